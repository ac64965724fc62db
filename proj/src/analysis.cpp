#include "gptik/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "gptik/solver.hpp"

namespace gptik::analysis {
namespace {

using geometry::ConvexSet;
using objectives::QuadraticForm;
using objectives::Regularizer;
using objectives::SmoothObjective;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Linear-constraint form G x <= h, E x == e of the polyhedral set kinds.

struct LinearPolyhedron {
  Matrix G;
  Vector h;
  Matrix E;
  Vector e;
};

LinearPolyhedron polyhedron_of(const ConvexSet& Q) {
  const Eigen::Index d = Q.dim();
  LinearPolyhedron P;
  P.G = Matrix::Zero(0, d);
  P.h = Vector::Zero(0);
  P.E = Matrix::Zero(0, d);
  P.e = Vector::Zero(0);
  switch (Q.kind()) {
    case ConvexSet::Kind::box:
      P.G = Matrix::Zero(2 * d, d);
      P.h = Vector::Zero(2 * d);
      P.G.topRows(d) = -Matrix::Identity(d, d);
      P.h.head(d) = -Q.lower();
      P.G.bottomRows(d) = Matrix::Identity(d, d);
      P.h.tail(d) = Q.upper();
      break;
    case ConvexSet::Kind::simplex:
      P.G = -Matrix::Identity(d, d);
      P.h = Vector::Zero(d);
      P.E = Matrix::Ones(1, d);
      P.e = Vector::Constant(1, Q.scale());
      break;
    case ConvexSet::Kind::halfspace:
      P.G = Q.normal().transpose();
      P.h = Vector::Constant(1, Q.offset());
      break;
    case ConvexSet::Kind::affine_hyperplane:
      P.E = Q.normal().transpose();
      P.e = Vector::Constant(1, Q.offset());
      break;
    case ConvexSet::Kind::whole_space:
      break;
    case ConvexSet::Kind::ball:
      throw std::logic_error("polyhedron_of: ball is not polyhedral");
  }
  return P;
}

// ---------------------------------------------------------------------------
// Exact minimization of 0.5 <Hx,x> - <b,x> over a polyhedron by enumerating
// candidate active sets. Every accepted candidate is a genuine KKT point
// (stationarity is solved, primal feasibility and dual signs are checked),
// and convexity makes any KKT point a global minimizer, so the enumeration
// can only err by finding nothing.

struct QPMin {
  Vector x;
  double value = 0.0;
};

std::optional<QPMin> minimize_over_polyhedron(const Matrix& H, const Vector& b,
                                              const LinearPolyhedron& P) {
  const Eigen::Index d = H.rows();
  const Eigen::Index mi = P.G.rows();
  const Eigen::Index me = P.E.rows();
  if (mi > 20) throw OracleUnavailable("too many inequality rows for active-set enumeration");

  std::optional<QPMin> best;
  const double hscale = (mi > 0) ? P.h.cwiseAbs().maxCoeff() : 0.0;

  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << mi); ++mask) {
    const int na = std::popcount(mask);
    if (na > d) continue;

    std::vector<Eigen::Index> act;
    act.reserve(static_cast<std::size_t>(na));
    for (Eigen::Index i = 0; i < mi; ++i)
      if (mask & (std::uint64_t{1} << i)) act.push_back(i);

    const Eigen::Index nv = d + na + me;
    Matrix K = Matrix::Zero(nv, nv);
    Vector rhs = Vector::Zero(nv);
    K.topLeftCorner(d, d) = H;
    rhs.head(d) = b;
    for (Eigen::Index j = 0; j < na; ++j) {
      K.row(d + j).head(d) = P.G.row(act[static_cast<std::size_t>(j)]);
      K.col(d + j).head(d) = P.G.row(act[static_cast<std::size_t>(j)]).transpose();
      rhs(d + j) = P.h(act[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index i = 0; i < me; ++i) {
      K.row(d + na + i).head(d) = P.E.row(i);
      K.col(d + na + i).head(d) = P.E.row(i).transpose();
      rhs(d + na + i) = P.e(i);
    }

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
    const Vector z = cod.solve(rhs);
    if (!is_finite(z)) continue;
    if ((K * z - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;  // inconsistent pattern

    const Vector x = z.head(d);
    const double feas_tol = 1e-8 * (1.0 + hscale + x.norm());
    if (mi > 0 && (P.G * x - P.h).maxCoeff() > feas_tol) continue;
    if (me > 0 && (P.E * x - P.e).cwiseAbs().maxCoeff() > feas_tol) continue;
    if (na > 0) {
      const Vector lam = z.segment(d, na);
      if (lam.minCoeff() < -1e-8 * (1.0 + b.norm() + x.norm())) continue;
    }

    const double v = 0.5 * x.dot(H * x) - b.dot(x);
    if (!best || v < best->value) best = QPMin{x, v};
  }
  return best;
}

// Orthonormal basis of the null space of a symmetric PSD matrix.
Matrix null_basis(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  if (es.info() != Eigen::Success) throw OracleUnavailable("eigendecomposition failed");
  const Vector lam = es.eigenvalues();  // ascending
  const double lmax = std::max(0.0, lam(lam.size() - 1));
  const double tol = 1e-10 * std::max(1.0, lmax);
  Eigen::Index k = 0;
  while (k < lam.size() && lam(k) <= tol) ++k;
  return es.eigenvectors().leftCols(k);
}

// Orthonormal basis of null(R) for a small dense R (possibly zero rows).
Matrix kernel_cols(const Matrix& R) {
  const Eigen::Index k = R.cols();
  if (R.rows() == 0) return Matrix::Identity(k, k);
  Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  const double smax = (sv.size() > 0) ? sv(0) : 0.0;
  const double tol = 1e-10 * std::max(1.0, smax);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  return svd.matrixV().rightCols(k - rank);
}

// Directions along which a quadratic with form (H, b) is constant: the
// intersection of null(H), the orthogonal complement of b, and null(E).
Matrix flat_directions(const QuadraticForm& qf, const LinearPolyhedron& P) {
  const Matrix N = null_basis(qf.H);
  if (N.cols() == 0) return N;
  Matrix R(1 + P.E.rows(), N.cols());
  R.row(0) = (qf.b.transpose() * N);
  if (P.E.rows() > 0) R.bottomRows(P.E.rows()) = P.E * N;
  return N * kernel_cols(R);
}

// Representative feasible points of an unbounded (or high-flat-dimension)
// affine piece: the anchor plus clamped moves along each flat direction.
std::vector<Vector> representative_points(const Vector& anchor, const Matrix& W, const Matrix& Gt,
                                          const Vector& ht) {
  std::vector<Vector> pts{anchor};
  auto push_unique = [&pts](const Vector& p) {
    for (const Vector& q : pts)
      if ((q - p).norm() <= 1e-9 * (1.0 + p.norm())) return;
    pts.push_back(p);
  };
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    double lo = -kInf;
    double hi = kInf;
    for (Eigen::Index i = 0; i < Gt.rows(); ++i) {
      const double g = Gt(i, j);
      if (g > 1e-13) {
        hi = std::min(hi, ht(i) / g);
      } else if (g < -1e-13) {
        lo = std::max(lo, ht(i) / g);
      }
    }
    const double tplus = std::min(hi, 1.0);
    const double tminus = std::max(lo, -1.0);
    if (tplus > 1e-9) push_unique(anchor + tplus * W.col(j));
    if (tminus < -1e-9) push_unique(anchor + tminus * W.col(j));
  }
  return pts;
}

// Vertex enumeration of { t : Gt t <= ht } in k >= 2 dimensions.
std::vector<Vector> enumerate_vertices(const Matrix& Gt, const Vector& ht) {
  const Eigen::Index mi = Gt.rows();
  const Eigen::Index k = Gt.cols();
  std::vector<Vector> verts;
  if (mi < k) return verts;
  std::vector<Eigen::Index> comb(static_cast<std::size_t>(k));

  const double hscale = (mi > 0) ? ht.cwiseAbs().maxCoeff() : 0.0;
  auto try_comb = [&]() {
    Matrix A(k, k);
    Vector rhs(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      A.row(j) = Gt.row(comb[static_cast<std::size_t>(j)]);
      rhs(j) = ht(comb[static_cast<std::size_t>(j)]);
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (lu.rank() < k) return;
    const Vector t = lu.solve(rhs);
    if (!is_finite(t)) return;
    if ((Gt * t - ht).maxCoeff() > 1e-8 * (1.0 + hscale + t.norm())) return;
    for (const Vector& u : verts)
      if ((u - t).norm() <= 1e-7 * (1.0 + t.norm())) return;
    verts.push_back(t);
  };

  // lexicographic k-combinations of {0..mi-1}
  for (Eigen::Index j = 0; j < k; ++j) comb[static_cast<std::size_t>(j)] = j;
  while (true) {
    try_comb();
    Eigen::Index j = k - 1;
    while (j >= 0 && comb[static_cast<std::size_t>(j)] == mi - k + j) --j;
    if (j < 0) break;
    ++comb[static_cast<std::size_t>(j)];
    for (Eigen::Index l = j + 1; l < k; ++l)
      comb[static_cast<std::size_t>(l)] = comb[static_cast<std::size_t>(l - 1)] + 1;
  }
  return verts;
}

// Projection of t0 onto { t : Gt t <= ht } (exact, via the same KKT
// enumeration with the identity Hessian).
Vector project_onto_rows(const Vector& t0, const Matrix& Gt, const Vector& ht) {
  if (Gt.rows() == 0) return t0;
  LinearPolyhedron P;
  P.G = Gt;
  P.h = ht;
  P.E = Matrix::Zero(0, t0.size());
  P.e = Vector::Zero(0);
  const auto r = minimize_over_polyhedron(Matrix::Identity(t0.size(), t0.size()), t0, P);
  if (!r) throw OracleUnavailable("projection onto the solution set failed");
  return r->x;
}

// Smallest-norm minimizer of 0.5 <Hz,z> - <btil,z> over |z| <= r, H PSD,
// by the spectral secular equation. Assumes a minimum exists (always true
// on the ball). Returns z in centered coordinates.
Vector ball_minimizer_centered(const Matrix& H, const Vector& btil, double r) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  if (es.info() != Eigen::Success) throw OracleUnavailable("eigendecomposition failed");
  const Vector lam = es.eigenvalues();
  const Matrix& V = es.eigenvectors();
  const Vector beta = V.transpose() * btil;
  const Eigen::Index d = lam.size();
  const double lmax = std::max(0.0, lam(d - 1));
  const double eigtol = 1e-10 * std::max(1.0, lmax);

  auto z_of = [&](double mu) {
    Vector z(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double den = lam(i) + mu;
      z(i) = (std::abs(beta(i)) < 1e-300) ? 0.0 : beta(i) / den;
    }
    return z;
  };

  double beta_null_sq = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    if (lam(i) <= eigtol) beta_null_sq += beta(i) * beta(i);

  if (std::sqrt(beta_null_sq) <= 1e-10 * (1.0 + btil.norm())) {
    Vector z0 = Vector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i)
      if (lam(i) > eigtol) z0(i) = beta(i) / lam(i);
    if (z0.norm() <= r * (1.0 + 1e-12) + 1e-12) return V * z0;  // interior stationary point
  }

  // boundary solution: |z(mu)| = r has a unique root mu > 0
  double hi = std::max(beta.norm() / r, 1e-12);
  while (z_of(hi).norm() > r) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 300 && (hi - lo) > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (z_of(mid).norm() > r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Vector z = z_of(hi);
  const double zn = z.norm();
  if (zn > 0) z *= r / zn;  // pin to the boundary exactly
  return V * z;
}

// Exact unique minimizer of 0.5 <Hx,x> - <bx> over Q for positive-definite H
// (used by the regularization path).
Vector minimize_pd_over_set(const Matrix& H, const Vector& b, const ConvexSet& Q) {
  if (Q.kind() == ConvexSet::Kind::ball) {
    const Vector btil = b - H * Q.center();
    return Q.center() + ball_minimizer_centered(H, btil, Q.radius());
  }
  if (Q.dim() > 6 && Q.kind() != ConvexSet::Kind::whole_space)
    throw OracleUnavailable("exact polyhedral minimization is limited to dimension <= 6");
  const auto r = minimize_over_polyhedron(H, b, polyhedron_of(Q));
  if (!r) throw OracleUnavailable("KKT enumeration certified no minimizer");
  return Q.project(r->x);
}

}  // namespace

// ---------------------------------------------------------------------------
// Long-run numeric fallback: several independent regularized runs that must
// agree on the limit.

SolutionOracle numeric_fallback_oracle(const SmoothObjective& f, const ConvexSet& Q,
                                       const std::optional<Regularizer>& phi) {
  if (!phi)
    throw OracleUnavailable(
        "no exact route for this objective/set and no regularizer for a long-run fallback");
  const double L = f.lipschitz_constant() + phi->lipschitz_constant();
  const double gamma = 1.8 / std::max(L, 1e-6);

  const auto starts = Q.sample(20240817u, 3);
  std::vector<Vector> finals;
  for (const Vector& s : starts) {
    auto p = solver::ProblemInstance::make(
        f, Q, phi, schedules::Schedule::power_law(gamma, 0.0, 1.0, 0.5), s);
    solver::StopRule stop;
    stop.max_iterations = 10'000'000;
    const auto trace = solver::run(p, solver::Mode::ggp, stop, solver::LogPolicy::geometric());
    if (trace.status == solver::RunStatus::aborted_nonfinite)
      throw OracleUnavailable("long-run fallback aborted: " + trace.stop_reason);
    finals.push_back(trace.final_x);
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < finals.size(); ++i)
    for (std::size_t j = i + 1; j < finals.size(); ++j)
      spread = std::max(spread, (finals[i] - finals[j]).norm());
  if (spread > 1e-6)
    throw OracleUnavailable("long-run starts disagree by " + fmt(spread) +
                            " (> 1e-6); the limit is not certified");

  Vector mean = Vector::Zero(Q.dim());
  for (const Vector& v : finals) mean += v;
  mean /= static_cast<double>(finals.size());
  mean = Q.project(mean);

  SolutionOracle o;
  o.method_ = OracleMethod::long_run_numeric;
  o.piece_ = SolutionOracle::PieceKind::samples_only;
  o.anchor_ = mean;
  o.set_.kind = SolutionSet::Kind::sampled;
  o.set_.points = finals;
  double fstar = kInf;
  for (const Vector& v : finals) fstar = std::min(fstar, f.value(v));
  o.f_star_ = fstar;
  o.y_star_ = mean;
  return o;
}

// ---------------------------------------------------------------------------

double SolutionOracle::distance_to(const Vector& x) const {
  return (x - project_onto_set(x)).norm();
}

Vector SolutionOracle::project_onto_set(const Vector& x) const {
  require_vector(x, anchor_.size(), "point");
  switch (piece_) {
    case PieceKind::samples_only: {
      double best = kInf;
      const Vector* arg = &anchor_;
      for (const Vector& p : set_.points) {
        const double dd = (x - p).norm();
        if (dd < best) {
          best = dd;
          arg = &p;
        }
      }
      return *arg;
    }
    case PieceKind::affine_poly: {
      if (W_.cols() == 0) return anchor_;
      const Vector tx = W_.transpose() * (x - anchor_);
      return anchor_ + W_ * project_onto_rows(tx, Gt_, ht_);
    }
    case PieceKind::affine_disk: {
      if (W_.cols() == 0) return anchor_;
      Vector tx = W_.transpose() * (x - anchor_);
      const double tn = tx.norm();
      if (tn > rho_) tx *= (tn > 0 ? rho_ / tn : 0.0);
      return anchor_ + W_ * tx;
    }
  }
  return anchor_;
}

bool exact_oracle_applies(const SmoothObjective& f, const ConvexSet& Q) {
  if (!f.quadratic_form()) return false;
  return Q.kind() == ConvexSet::Kind::ball || Q.kind() == ConvexSet::Kind::whole_space ||
         Q.dim() <= 6;
}

SolutionOracle solve_oracle(const SmoothObjective& f, const ConvexSet& Q,
                            const std::optional<Regularizer>& phi) {
  if (f.dim() != Q.dim())
    throw std::invalid_argument("objective and set dimensions differ");
  if (phi && phi->dim() != Q.dim())
    throw std::invalid_argument("regularizer and set dimensions differ");

  const auto qf = f.quadratic_form();
  const bool exact_ball = qf && Q.kind() == ConvexSet::Kind::ball;
  const bool exact_poly = !exact_ball && exact_oracle_applies(f, Q);

  if (!exact_poly && !exact_ball) return numeric_fallback_oracle(f, Q, phi);

  SolutionOracle o;

  if (exact_ball) {
    o.method_ = OracleMethod::closed_form;
    const Vector c0 = Q.center();
    const double r = Q.radius();
    const Vector btil = qf->b - qf->H * c0;

    Eigen::SelfAdjointEigenSolver<Matrix> es(qf->H);
    if (es.info() != Eigen::Success) throw OracleUnavailable("eigendecomposition failed");
    const Vector lam = es.eigenvalues();
    const Matrix& V = es.eigenvectors();
    const Vector beta = V.transpose() * btil;
    const double lmax = std::max(0.0, lam(lam.size() - 1));
    const double eigtol = 1e-10 * std::max(1.0, lmax);

    Eigen::Index nnull = 0;
    double beta_null_sq = 0.0;
    while (nnull < lam.size() && lam(nnull) <= eigtol) {
      beta_null_sq += beta(nnull) * beta(nnull);
      ++nnull;
    }

    bool family = false;
    Vector z0 = Vector::Zero(Q.dim());
    if (std::sqrt(beta_null_sq) <= 1e-10 * (1.0 + btil.norm())) {
      Vector z0c = Vector::Zero(lam.size());
      for (Eigen::Index i = nnull; i < lam.size(); ++i) z0c(i) = beta(i) / lam(i);
      if (z0c.norm() <= r * (1.0 + 1e-12) + 1e-12) {
        family = true;
        z0 = V * z0c;
      }
    }

    if (family && nnull > 0) {
      // flat slice of the ball: a disk of flat directions around c0 + z0
      o.anchor_ = c0 + z0;
      o.W_ = V.leftCols(nnull);
      o.rho_ = std::sqrt(std::max(r * r - z0.squaredNorm(), 0.0));
      o.piece_ = SolutionOracle::PieceKind::affine_disk;
      if (o.rho_ <= 1e-14) {
        o.set_.kind = SolutionSet::Kind::point;
        o.set_.points = {o.anchor_};
        o.W_ = Matrix::Zero(Q.dim(), 0);
        o.piece_ = SolutionOracle::PieceKind::affine_poly;
      } else if (nnull == 1) {
        o.set_.kind = SolutionSet::Kind::segment;
        o.set_.points = {o.anchor_ - o.rho_ * o.W_.col(0), o.anchor_ + o.rho_ * o.W_.col(0)};
      } else {
        o.set_.kind = SolutionSet::Kind::sampled;
        o.set_.points = {o.anchor_};
        for (Eigen::Index j = 0; j < nnull; ++j) {
          o.set_.points.push_back(o.anchor_ + o.rho_ * o.W_.col(j));
          o.set_.points.push_back(o.anchor_ - o.rho_ * o.W_.col(j));
        }
      }
    } else {
      const Vector z = family ? z0 : ball_minimizer_centered(qf->H, btil, r);
      o.anchor_ = c0 + z;
      o.W_ = Matrix::Zero(Q.dim(), 0);
      o.piece_ = SolutionOracle::PieceKind::affine_poly;
      o.set_.kind = SolutionSet::Kind::point;
      o.set_.points = {o.anchor_};
    }
  } else {
    o.method_ = OracleMethod::kkt_enumeration;
    const LinearPolyhedron P = polyhedron_of(Q);
    const auto best = minimize_over_polyhedron(qf->H, qf->b, P);
    if (!best)
      throw OracleUnavailable(
          "KKT enumeration certified no minimizer (the objective may be unbounded below on the "
          "set)");
    o.anchor_ = Q.project(best->x);
    o.W_ = flat_directions(*qf, P);
    o.piece_ = SolutionOracle::PieceKind::affine_poly;
    o.Gt_ = P.G * o.W_;
    o.ht_ = P.h - P.G * o.anchor_;
    const Eigen::Index k = o.W_.cols();

    if (k == 0) {
      o.set_.kind = SolutionSet::Kind::point;
      o.set_.points = {o.anchor_};
    } else if (k == 1) {
      double lo = -kInf;
      double hi = kInf;
      for (Eigen::Index i = 0; i < o.Gt_.rows(); ++i) {
        const double g = o.Gt_(i, 0);
        if (g > 1e-13) {
          hi = std::min(hi, o.ht_(i) / g);
        } else if (g < -1e-13) {
          lo = std::max(lo, o.ht_(i) / g);
        }
      }
      if (std::isfinite(lo) && std::isfinite(hi)) {
        o.set_.kind = SolutionSet::Kind::segment;
        o.set_.points = {o.anchor_ + lo * o.W_.col(0), o.anchor_ + hi * o.W_.col(0)};
      } else {
        o.set_.kind = SolutionSet::Kind::sampled;
        o.set_.points = representative_points(o.anchor_, o.W_, o.Gt_, o.ht_);
      }
    } else {
      const bool bounded =
          Q.kind() == ConvexSet::Kind::box || Q.kind() == ConvexSet::Kind::simplex;
      std::vector<Vector> verts = bounded ? enumerate_vertices(o.Gt_, o.ht_) : std::vector<Vector>{};
      if (!verts.empty()) {
        o.set_.kind = SolutionSet::Kind::polytope;
        o.set_.points.clear();
        for (const Vector& t : verts) o.set_.points.push_back(o.anchor_ + o.W_ * t);
      } else {
        o.set_.kind = SolutionSet::Kind::sampled;
        o.set_.points = representative_points(o.anchor_, o.W_, o.Gt_, o.ht_);
      }
    }
  }

  o.f_star_ = f.value(o.anchor_);

  if (phi) {
    if (o.W_.cols() == 0) {
      o.y_star_ = o.anchor_;
    } else {
      const Vector tu = o.W_.transpose() * (phi->center - o.anchor_);
      Vector tstar;
      if (o.piece_ == SolutionOracle::PieceKind::affine_disk) {
        tstar = tu;
        const double tn = tstar.norm();
        if (tn > o.rho_) tstar *= o.rho_ / tn;
      } else {
        tstar = project_onto_rows(tu, o.Gt_, o.ht_);
      }
      o.y_star_ = o.anchor_ + o.W_ * tstar;
    }
  }
  return o;
}

std::vector<Vector> regularization_path(const SmoothObjective& f, const ConvexSet& Q,
                                        const Regularizer& phi,
                                        const std::vector<double>& alphas) {
  if (f.dim() != Q.dim() || phi.dim() != Q.dim())
    throw std::invalid_argument("regularization_path: dimension mismatch");
  const auto qf = f.quadratic_form();
  if (!qf)
    throw OracleUnavailable("the regularization path needs a globally quadratic objective");
  const auto qp = phi.objective.quadratic_form();
  if (!qp) throw OracleUnavailable("the regularization path needs a quadratic regularizer");

  std::vector<Vector> path;
  path.reserve(alphas.size());
  for (const double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("regularization_path: alphas must be positive and finite");
    const Matrix H = qf->H + a * qp->H;
    const Vector b = qf->b + a * qp->b;
    path.push_back(minimize_pd_over_set(H, b, Q));
  }
  return path;
}

// ---------------------------------------------------------------------------
// Scalar sequence generators and the recursion checks.

SequenceSpec SequenceSpec::constant(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("sequence: constant must be finite");
  SequenceSpec s;
  s.kind = Kind::constant;
  s.coeff = c;
  return s;
}

SequenceSpec SequenceSpec::power(double c, double p, long shift) {
  if (!std::isfinite(c) || !std::isfinite(p))
    throw std::invalid_argument("sequence: power parameters must be finite");
  if (shift < 0) throw std::invalid_argument("sequence: power shift must be >= 0");
  SequenceSpec s;
  s.kind = Kind::power;
  s.coeff = c;
  s.exponent = p;
  s.shift = shift;
  return s;
}

SequenceSpec SequenceSpec::inv_log(double c, long shift) {
  if (!std::isfinite(c)) throw std::invalid_argument("sequence: inv_log coefficient must be finite");
  if (shift < 1) throw std::invalid_argument("sequence: inv_log shift must be >= 1");
  SequenceSpec s;
  s.kind = Kind::inv_log;
  s.coeff = c;
  s.shift = shift;
  return s;
}

double SequenceSpec::eval(long n) const {
  if (n < 1) throw std::invalid_argument("sequence: index starts at 1");
  const double nd = static_cast<double>(n + shift);
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return coeff;
    case Kind::power:
      return coeff * std::pow(nd, -exponent);
    case Kind::inv_log:
      return coeff / std::log(nd);
  }
  return 0.0;
}

bool SequenceSpec::sum_diverges() const {
  if (coeff == 0.0 || kind == Kind::zero) return false;
  switch (kind) {
    case Kind::constant:
    case Kind::inv_log:
      return true;
    case Kind::power:
      return exponent <= 1.0;
    case Kind::zero:
      return false;
  }
  return false;
}

bool SequenceSpec::tends_to_zero() const {
  switch (kind) {
    case Kind::zero:
      return true;
    case Kind::constant:
      return coeff == 0.0;
    case Kind::power:
      return coeff == 0.0 || exponent > 0.0;
    case Kind::inv_log:
      return true;
  }
  return false;
}

namespace {

void validate_lemma5(const LemmaFiveInstance& inst) {
  if (!(inst.u0 >= 0.0) || !std::isfinite(inst.u0))
    throw std::invalid_argument("recursion: u0 must be finite and >= 0");
  // eps must stay in [0, 1]; every generator kind here is nonincreasing in n
  // once its parameters pass these checks, so the value at n = 1 is the max.
  const auto& e = inst.eps;
  if (e.kind == SequenceSpec::Kind::power && e.exponent < 0.0)
    throw std::invalid_argument("recursion: eps must be nonincreasing (power exponent >= 0)");
  const double e1 = e.eval(1);
  if (!(e1 >= 0.0) || e1 > 1.0 + 1e-15)
    throw std::invalid_argument("recursion: eps values must lie in [0, 1] (eps_1 = " + fmt(e1) +
                                ")");
  const auto& r = inst.r;
  if (r.coeff < 0.0)
    throw std::invalid_argument("recursion: r must be nonnegative");
  if (r.kind == SequenceSpec::Kind::power && r.exponent < 0.0)
    throw std::invalid_argument("recursion: r must not grow (power exponent >= 0)");
  const auto& dl = inst.delta;
  if (dl.coeff < 0.0)
    throw std::invalid_argument("recursion: delta must be nonnegative");
  const bool summable = dl.kind == SequenceSpec::Kind::zero || dl.coeff == 0.0 ||
                        (dl.kind == SequenceSpec::Kind::power && dl.exponent > 1.0);
  if (!summable)
    throw std::invalid_argument("recursion: delta must be summable (zero, or power with exponent > 1)");
}

}  // namespace

LemmaFiveResult lemma5_simulate(const LemmaFiveInstance& inst, long horizon, bool saturate,
                                std::uint64_t seed) {
  if (horizon < 1 || horizon > 100'000'000)
    throw std::invalid_argument("recursion: horizon must be in [1, 1e8]");
  validate_lemma5(inst);

  // total delta mass (compensated), consumed forward so T_k = sum_{m>=k} delta_m
  double total = 0.0;
  double comp = 0.0;
  for (long k = horizon; k >= 1; --k) {
    const double y = inst.delta.eval(k) - comp;
    const double t = total + y;
    comp = (t - total) - y;
    total = t;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  LemmaFiveResult res;
  double u = inst.u0;
  double T = total;          // T_k before step k
  double B = inst.u0 + total;  // bound for u_k + T_{k+1}
  const long tail_start = horizon - horizon / 10 + 1;
  res.tail_max_u = 0.0;
  res.tail_sup_r = 0.0;

  for (long k = 1; k <= horizon; ++k) {
    const double eps = inst.eps.eval(k);
    const double r = inst.r.eval(k);
    const double dl = inst.delta.eval(k);
    u = (1.0 - eps) * u + eps * r + dl;
    if (!saturate) u *= unif(rng);
    B = std::exp(-eps) * B + eps * (r + T);
    const double Tnext = T - dl;
    if (u > B - Tnext + 1e-9 * (1.0 + std::abs(B))) {
      if (res.first_bound_violation < 0) res.first_bound_violation = k;
      res.within_integrating_bound = false;
    }
    T = Tnext;
    if (k >= tail_start) {
      res.tail_max_u = std::max(res.tail_max_u, u);
      res.tail_sup_r = std::max(res.tail_sup_r, r);
    }
  }

  res.final_u = u;
  const double e = std::exp(1.0);
  res.respects_limit_bound = res.tail_max_u <= e * res.tail_sup_r + 1e-12;
  if (res.tail_sup_r > 0.0) {
    res.empirical_ratio = res.tail_max_u / res.tail_sup_r;
  } else {
    res.empirical_ratio = (res.tail_max_u > 0.0) ? kInf : 0.0;
  }
  return res;
}

Lemma3Result lemma3_check(const std::vector<double>& xs, const std::vector<double>& deltas) {
  if (xs.empty()) throw std::invalid_argument("lemma3_check: xs must be nonempty");
  for (const double x : xs)
    if (!std::isfinite(x)) throw std::invalid_argument("lemma3_check: xs must be finite");
  for (const double d : deltas)
    if (!(d >= 0.0) || !std::isfinite(d))
      throw std::invalid_argument("lemma3_check: deltas must be finite and >= 0");
  const std::size_t K = xs.size() - 1;
  if (deltas.size() < K)
    throw std::invalid_argument("lemma3_check: need a delta for every transition");

  Lemma3Result res;
  for (std::size_t k = 0; k < K; ++k) {
    if (xs[k + 1] > xs[k] + deltas[k] + 1e-12 * (1.0 + std::abs(xs[k]))) {
      res.hypothesis_ok = false;
      res.violation_index = static_cast<long>(k + 1);
      break;
    }
  }

  // tails of the provided deltas: T[k] = sum_{m >= k} deltas[m]
  std::vector<double> tail(deltas.size() + 1, 0.0);
  for (std::size_t m = deltas.size(); m-- > 0;) tail[m] = deltas[m] + tail[m + 1];

  double prev_u = xs[0] + tail[0];
  for (std::size_t k = 1; k <= K; ++k) {
    const double u = xs[k] + tail[k];
    if (u > prev_u + 1e-12 * (1.0 + std::abs(prev_u))) {
      res.aux_nonincreasing = false;
      break;
    }
    prev_u = u;
  }

  res.limit_estimate = xs.back();
  res.error_bound = tail[K];
  return res;
}

}  // namespace gptik::analysis
