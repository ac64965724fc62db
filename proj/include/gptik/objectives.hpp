#pragma once

#include <memory>
#include <optional>

#include "gptik/geometry.hpp"
#include "gptik/types.hpp"

namespace gptik::objectives {

/// Quadratic normal form 0.5 <Hx, x> - <b, x> + c with H symmetric PSD.
/// Available for objectives whose value is globally quadratic; used by the
/// exact minimization oracles.
struct QuadraticForm {
  Matrix H;
  Vector b;
  double c = 0.0;

  double value(const Vector& x) const { return 0.5 * x.dot(H * x) - b.dot(x) + c; }
  Vector gradient(const Vector& x) const { return H * x - b; }
};

/// Convex differentiable objective with a globally Lipschitz gradient.
///
/// Catalogue:
///   quadratic(A, b, c)     0.5 <Ax, x> - <b, x> + c, A symmetric PSD
///   least_squares(M, y)    0.5 |Mx - y|^2
///   huberized_norm(d, dl)  Huber smoothing of |x| with threshold dl
///   translated(base, s)    base(x - s)
///
/// The gradient Lipschitz constant is the top eigenvalue of the Hessian
/// (A, M^T M), computed by power iteration at construction; 1/dl for the
/// huberized norm. The strong-convexity modulus is the bottom eigenvalue
/// (0 for the huberized norm).
class SmoothObjective {
 public:
  static SmoothObjective quadratic(Matrix A, Vector b, double c);
  static SmoothObjective least_squares(Matrix M, Vector y);
  static SmoothObjective huberized_norm(Eigen::Index dim, double delta);
  static SmoothObjective translated(SmoothObjective base, Vector shift);

  Eigen::Index dim() const { return dim_; }
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  /// Global Lipschitz constant of the gradient (valid over any subset).
  double lipschitz_constant() const { return lipschitz_; }

  /// Strong-convexity modulus m >= 0; positive only for positive-definite
  /// quadratics / full-column-rank least squares.
  double strong_convexity() const { return modulus_; }

  /// The objective written as 0.5 <Hx,x> - <b,x> + c, when it is globally
  /// quadratic (quadratic, least_squares, and translations thereof);
  /// nullopt for the huberized norm.
  std::optional<QuadraticForm> quadratic_form() const;

 private:
  enum class Kind { quadratic, least_squares, huber, translated };

  SmoothObjective() = default;

  Kind kind_ = Kind::quadratic;
  Eigen::Index dim_ = 0;
  double lipschitz_ = 0.0;
  double modulus_ = 0.0;
  Matrix A_;       // quadratic A / least-squares M
  Vector b_;       // quadratic b / least-squares y / translation shift
  double c_ = 0.0; // quadratic constant / huber threshold
  std::shared_ptr<const SmoothObjective> base_;  // translated only
};

/// Strongly convex regularizing term. Catalogue instances are the squared
/// distance to a center point:
///   half_squared_norm(d)        0.5 |x|^2
///   half_squared_distance(c)    0.5 |x - c|^2
/// Both have modulus m = 1 and gradient Lipschitz constant 1.
struct Regularizer {
  SmoothObjective objective;
  Vector center;

  static Regularizer half_squared_norm(Eigen::Index dim);
  static Regularizer half_squared_distance(Vector center);

  Eigen::Index dim() const { return objective.dim(); }
  double value(const Vector& x) const { return objective.value(x); }
  Vector gradient(const Vector& x) const { return objective.gradient(x); }
  double lipschitz_constant() const { return objective.lipschitz_constant(); }
  double strong_convexity() const { return objective.strong_convexity(); }

  /// Exact infimum over Q. The catalogue instances are radially symmetric
  /// about their center, so the constrained minimum sits at the projection
  /// of the center onto Q.
  double min_over(const geometry::ConvexSet& Q) const;

  /// The point achieving min_over(Q).
  Vector argmin_over(const geometry::ConvexSet& Q) const;
};

/// Checks the quadratic upper bound
///   g(y) <= g(x) + <grad g(x), y - x> + (L/2) |y - x|^2
/// at the pair (x, y), with slack 1e-9 (1 + |y - x|^2).
/// Both points must lie in Q (rejected otherwise): the bound is only
/// guaranteed where the gradient's Lipschitz constant is valid.
bool descent_lemma_check(const SmoothObjective& g, const geometry::ConvexSet& Q, const Vector& x,
                         const Vector& y);

/// Top eigenvalue of a symmetric PSD matrix by power iteration, to relative
/// tolerance 1e-12. Returns 0 for the zero matrix.
double top_eigenvalue_power(const Matrix& H);

}  // namespace gptik::objectives
