#include "gptik/objectives.hpp"

#include <cmath>

namespace gptik::objectives {

namespace {

// Bottom eigenvalue of a symmetric matrix, clamped to 0 when it is negative
// at rounding level only.
double bottom_eigenvalue(const Matrix& H, double scale) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -1e-9 * std::max(1.0, scale)) {
    throw std::invalid_argument("quadratic matrix: not positive semidefinite");
  }
  return std::max(lo, 0.0);
}

Matrix symmetrized(const Matrix& A) {
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (((A - A.transpose()).cwiseAbs().maxCoeff()) > 1e-9 * scale) {
    throw std::invalid_argument("quadratic matrix: must be symmetric");
  }
  return 0.5 * (A + A.transpose());
}

}  // namespace

double top_eigenvalue_power(const Matrix& H) {
  const Eigen::Index d = H.rows();
  const double scale = H.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;

  // Deterministic starts: a ramp vector first, then basis vectors in case the
  // ramp happens to lie in the null space.
  for (Eigen::Index attempt = 0; attempt <= d; ++attempt) {
    Vector v(d);
    if (attempt == 0) {
      for (Eigen::Index i = 0; i < d; ++i) v[i] = 1.0 + static_cast<double>(i + 1) / (2.0 * d);
    } else {
      v = Vector::Unit(d, attempt - 1);
    }
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 200000; ++it) {
      Vector w = H * v;
      const double wn = w.norm();
      if (wn <= 1e-300 * scale) break;  // start vector in the null space
      v = w / wn;
      const double next = v.dot(H * v);
      if (it > 0 && std::abs(next - lambda) <= 1e-12 * std::max(std::abs(next), 1e-300)) {
        return next;
      }
      lambda = next;
    }
    if (lambda > 0.0) return lambda;
  }
  return 0.0;
}

SmoothObjective SmoothObjective::quadratic(Matrix A, Vector b, double c) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    throw std::invalid_argument("quadratic A: must be square with dimension >= 1");
  }
  if (!A.allFinite()) throw std::invalid_argument("quadratic A: non-finite entry");
  require_vector(b, A.rows(), "quadratic b");
  if (!std::isfinite(c)) throw std::invalid_argument("quadratic c: non-finite");

  SmoothObjective f;
  f.kind_ = Kind::quadratic;
  f.dim_ = A.rows();
  f.A_ = symmetrized(A);
  f.b_ = std::move(b);
  f.c_ = c;
  f.lipschitz_ = top_eigenvalue_power(f.A_);
  f.modulus_ = bottom_eigenvalue(f.A_, f.lipschitz_);
  return f;
}

SmoothObjective SmoothObjective::least_squares(Matrix M, Vector y) {
  if (M.rows() < 1 || M.cols() < 1) {
    throw std::invalid_argument("least_squares M: must be nonempty");
  }
  if (!M.allFinite()) throw std::invalid_argument("least_squares M: non-finite entry");
  require_vector(y, M.rows(), "least_squares y");

  SmoothObjective f;
  f.kind_ = Kind::least_squares;
  f.dim_ = M.cols();
  f.A_ = std::move(M);
  f.b_ = std::move(y);
  const Matrix gram = f.A_.transpose() * f.A_;
  f.lipschitz_ = top_eigenvalue_power(gram);
  f.modulus_ = bottom_eigenvalue(gram, f.lipschitz_);
  return f;
}

SmoothObjective SmoothObjective::huberized_norm(Eigen::Index dim, double delta) {
  if (dim < 1) throw std::invalid_argument("huberized_norm: dimension must be >= 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("huberized_norm delta: must be positive and finite");
  }
  SmoothObjective f;
  f.kind_ = Kind::huber;
  f.dim_ = dim;
  f.c_ = delta;
  f.lipschitz_ = 1.0 / delta;
  f.modulus_ = 0.0;
  return f;
}

SmoothObjective SmoothObjective::translated(SmoothObjective base, Vector shift) {
  require_vector(shift, base.dim(), "translated shift");
  SmoothObjective f;
  f.kind_ = Kind::translated;
  f.dim_ = base.dim();
  f.lipschitz_ = base.lipschitz_constant();
  f.modulus_ = base.strong_convexity();
  f.b_ = std::move(shift);
  f.base_ = std::make_shared<const SmoothObjective>(std::move(base));
  return f;
}

double SmoothObjective::value(const Vector& x) const {
  require_vector(x, dim_, "objective value input");
  switch (kind_) {
    case Kind::quadratic:
      return 0.5 * x.dot(A_ * x) - b_.dot(x) + c_;
    case Kind::least_squares:
      return 0.5 * (A_ * x - b_).squaredNorm();
    case Kind::huber: {
      const double t = x.norm();
      return (t <= c_) ? t * t / (2.0 * c_) : t - 0.5 * c_;
    }
    case Kind::translated:
      return base_->value(x - b_);
  }
  throw std::logic_error("value: unreachable");
}

Vector SmoothObjective::gradient(const Vector& x) const {
  require_vector(x, dim_, "objective gradient input");
  switch (kind_) {
    case Kind::quadratic:
      return A_ * x - b_;
    case Kind::least_squares:
      return A_.transpose() * (A_ * x - b_);
    case Kind::huber: {
      const double t = x.norm();
      return (t <= c_) ? Vector(x / c_) : Vector(x / t);
    }
    case Kind::translated:
      return base_->gradient(x - b_);
  }
  throw std::logic_error("gradient: unreachable");
}

std::optional<QuadraticForm> SmoothObjective::quadratic_form() const {
  switch (kind_) {
    case Kind::quadratic:
      return QuadraticForm{A_, b_, c_};
    case Kind::least_squares:
      return QuadraticForm{A_.transpose() * A_, A_.transpose() * b_, 0.5 * b_.squaredNorm()};
    case Kind::huber:
      return std::nullopt;
    case Kind::translated: {
      auto base = base_->quadratic_form();
      if (!base) return std::nullopt;
      // base(x - s) = 0.5 <Hx,x> - <b + Hs, x> + (c + 0.5 <Hs,s> + <b,s>)
      QuadraticForm out;
      out.H = base->H;
      out.b = base->b + base->H * b_;
      out.c = base->c + 0.5 * b_.dot(base->H * b_) + base->b.dot(b_);
      return out;
    }
  }
  throw std::logic_error("quadratic_form: unreachable");
}

Regularizer Regularizer::half_squared_norm(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("half_squared_norm: dimension must be >= 1");
  return half_squared_distance(Vector::Zero(dim));
}

Regularizer Regularizer::half_squared_distance(Vector center) {
  require_finite(center, "half_squared_distance center");
  const auto d = center.size();
  SmoothObjective obj = SmoothObjective::quadratic(Matrix::Identity(d, d), center,
                                                   0.5 * center.squaredNorm());
  return Regularizer{std::move(obj), std::move(center)};
}

double Regularizer::min_over(const geometry::ConvexSet& Q) const {
  return value(argmin_over(Q));
}

Vector Regularizer::argmin_over(const geometry::ConvexSet& Q) const {
  if (Q.dim() != dim()) throw std::invalid_argument("regularizer min: dimension mismatch");
  return Q.project(center);
}

bool descent_lemma_check(const SmoothObjective& g, const geometry::ConvexSet& Q, const Vector& x,
                         const Vector& y) {
  if (!Q.contains(x, 1e-9) || !Q.contains(y, 1e-9)) {
    throw std::invalid_argument("descent_lemma_check: points must lie in Q");
  }
  const Vector d = y - x;
  const double lhs = g.value(y);
  const double rhs = g.value(x) + g.gradient(x).dot(d) +
                     0.5 * g.lipschitz_constant() * d.squaredNorm();
  return lhs <= rhs + 1e-9 * (1.0 + d.squaredNorm());
}

}  // namespace gptik::objectives
