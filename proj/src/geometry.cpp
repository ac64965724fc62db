#include "gptik/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace gptik::geometry {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + ": must be positive and finite");
  }
}

}  // namespace

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  require_finite(lower, "box lower");
  require_vector(upper, lower.size(), "box upper");
  if (((upper - lower).array() < 0.0).any()) {
    throw std::invalid_argument("box: lower must be <= upper componentwise");
  }
  const auto d = lower.size();
  return ConvexSet(Kind::box, d, std::move(lower), std::move(upper), 0.0);
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  require_finite(center, "ball center");
  require_positive(radius, "ball radius");
  const auto d = center.size();
  return ConvexSet(Kind::ball, d, std::move(center), Vector(), radius);
}

ConvexSet ConvexSet::simplex(Eigen::Index dim, double scale) {
  if (dim < 1) throw std::invalid_argument("simplex: dimension must be >= 1");
  require_positive(scale, "simplex scale");
  return ConvexSet(Kind::simplex, dim, Vector(), Vector(), scale);
}

ConvexSet ConvexSet::halfspace(Vector normal, double offset) {
  require_finite(normal, "halfspace normal");
  if (normal.norm() == 0.0) throw std::invalid_argument("halfspace normal: must be nonzero");
  if (!std::isfinite(offset)) throw std::invalid_argument("halfspace offset: non-finite");
  const auto d = normal.size();
  return ConvexSet(Kind::halfspace, d, std::move(normal), Vector(), offset);
}

ConvexSet ConvexSet::affine_hyperplane(Vector normal, double offset) {
  require_finite(normal, "hyperplane normal");
  if (normal.norm() == 0.0) throw std::invalid_argument("hyperplane normal: must be nonzero");
  if (!std::isfinite(offset)) throw std::invalid_argument("hyperplane offset: non-finite");
  const auto d = normal.size();
  return ConvexSet(Kind::affine_hyperplane, d, std::move(normal), Vector(), offset);
}

ConvexSet ConvexSet::whole_space(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("whole_space: dimension must be >= 1");
  return ConvexSet(Kind::whole_space, dim, Vector(), Vector(), 0.0);
}

Vector ConvexSet::project(const Vector& x) const {
  require_vector(x, dim_, "project input");
  switch (kind_) {
    case Kind::box:
      return x.cwiseMax(a_).cwiseMin(b_);
    case Kind::ball: {
      const Vector delta = x - a_;
      const double norm = delta.norm();
      if (norm <= scalar_) return x;
      return a_ + (scalar_ / norm) * delta;
    }
    case Kind::simplex: {
      // Sort-and-threshold: find the largest support size rho such that the
      // common shift theta keeps every supported coordinate positive.
      std::vector<double> u(x.data(), x.data() + x.size());
      std::sort(u.begin(), u.end(), std::greater<double>());
      double cumsum = 0.0;
      double theta = 0.0;
      for (std::size_t j = 0; j < u.size(); ++j) {
        cumsum += u[j];
        const double candidate = (cumsum - scalar_) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) theta = candidate;
      }
      return (x.array() - theta).max(0.0).matrix();
    }
    case Kind::halfspace: {
      const double violation = a_.dot(x) - scalar_;
      if (violation <= 0.0) return x;
      return x - (violation / a_.squaredNorm()) * a_;
    }
    case Kind::affine_hyperplane:
      return x - ((a_.dot(x) - scalar_) / a_.squaredNorm()) * a_;
    case Kind::whole_space:
      return x;
  }
  throw std::logic_error("project: unreachable");
}

bool ConvexSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) {
    throw std::invalid_argument("contains input: dimension mismatch (got " +
                                std::to_string(x.size()) + ", expected " + std::to_string(dim_) +
                                ")");
  }
  if (!x.allFinite()) return false;
  switch (kind_) {
    case Kind::box:
      return ((a_ - x).array() <= tol).all() && ((x - b_).array() <= tol).all();
    case Kind::ball:
      return (x - a_).norm() - scalar_ <= tol;
    case Kind::simplex:
      return ((-x).array() <= tol).all() && std::abs(x.sum() - scalar_) <= tol;
    case Kind::halfspace:
      return a_.dot(x) - scalar_ <= tol;
    case Kind::affine_hyperplane:
      return std::abs(a_.dot(x) - scalar_) <= tol;
    case Kind::whole_space:
      return true;
  }
  throw std::logic_error("contains: unreachable");
}

std::vector<Vector> ConvexSet::sample(std::uint64_t seed, int count) const {
  if (count < 0) throw std::invalid_argument("sample count: must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vector p(dim_);
    switch (kind_) {
      case Kind::box:
        for (Eigen::Index i = 0; i < dim_; ++i) {
          p[i] = a_[i] + (b_[i] - a_[i]) * unif(rng);
        }
        break;
      case Kind::ball: {
        for (Eigen::Index i = 0; i < dim_; ++i) p[i] = gauss(rng);
        const double norm = p.norm();
        // Radius factor u^(1/d) gives the uniform-in-volume law; the clamp
        // keeps the point strictly inside despite rounding.
        const double factor =
            std::min(std::pow(unif(rng), 1.0 / static_cast<double>(dim_)), 1.0 - 1e-12);
        p = (norm > 0.0) ? Vector(a_ + (scalar_ * factor / norm) * p) : a_;
        break;
      }
      case Kind::simplex: {
        for (Eigen::Index i = 0; i < dim_; ++i) p[i] = expo(rng);
        p *= scalar_ / p.sum();
        // Absorb the rounding residual into the largest coordinate so the
        // coordinate sum matches the scale exactly.
        Eigen::Index imax = 0;
        p.maxCoeff(&imax);
        p[imax] += scalar_ - p.sum();
        break;
      }
      case Kind::halfspace: {
        for (Eigen::Index i = 0; i < dim_; ++i) p[i] = gauss(rng);
        const double slack = std::abs(gauss(rng));
        const double shift = std::max(a_.dot(p) - scalar_, 0.0) + slack;
        p -= (shift / a_.squaredNorm()) * a_;
        break;
      }
      case Kind::affine_hyperplane: {
        for (Eigen::Index i = 0; i < dim_; ++i) p[i] = gauss(rng);
        p -= ((a_.dot(p) - scalar_) / a_.squaredNorm()) * a_;
        break;
      }
      case Kind::whole_space:
        for (Eigen::Index i = 0; i < dim_; ++i) p[i] = gauss(rng);
        break;
    }
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace gptik::geometry
