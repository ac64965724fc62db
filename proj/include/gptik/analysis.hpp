#pragma once

#include <optional>
#include <vector>

#include "gptik/geometry.hpp"
#include "gptik/objectives.hpp"
#include "gptik/types.hpp"

namespace gptik::analysis {

/// Signals an input outside of what the exact oracles can certify.
struct OracleUnavailable : std::runtime_error {
  explicit OracleUnavailable(const std::string& msg) : std::runtime_error("oracle unavailable: " + msg) {}
};

enum class OracleMethod { closed_form, kkt_enumeration, long_run_numeric };

/// Exact description of the minimizer set of f over Q.
///   point:    a unique minimizer
///   segment:  the convex hull of two endpoints
///   polytope: the convex hull of the listed vertices
///   sampled:  representative points only (numeric fallback or an unbounded
///             solution set); set queries are approximate in this case
struct SolutionSet {
  enum class Kind { point, segment, polytope, sampled };
  Kind kind = Kind::point;
  std::vector<Vector> points;
};

/// Ground truth about min_Q f, computed independently of the iterative
/// solver: by KKT active-set enumeration over polyhedral sets, closed-form
/// spectral reasoning over balls, or (for non-quadratic objectives or
/// dimension > 6) a labeled long-run numeric fallback.
class SolutionOracle {
 public:
  double f_star() const { return f_star_; }
  const SolutionSet& solution_set() const { return set_; }
  /// argmin of the regularizer over the solution set; present when the
  /// oracle was built with a regularizer.
  const std::optional<Vector>& y_star() const { return y_star_; }
  OracleMethod method() const { return method_; }

  /// Euclidean distance from x to the solution set (exact for point/segment/
  /// polytope descriptors; nearest-sample distance for sampled ones).
  double distance_to(const Vector& x) const;
  /// The point of the solution set closest to x (same caveat as above).
  Vector project_onto_set(const Vector& x) const;

 private:
  friend SolutionOracle solve_oracle(const objectives::SmoothObjective&,
                                     const geometry::ConvexSet&,
                                     const std::optional<objectives::Regularizer>&);
  friend SolutionOracle numeric_fallback_oracle(const objectives::SmoothObjective&,
                                                const geometry::ConvexSet&,
                                                const std::optional<objectives::Regularizer>&);

  enum class PieceKind { affine_poly, affine_disk, samples_only };

  double f_star_ = 0.0;
  SolutionSet set_;
  std::optional<Vector> y_star_;
  OracleMethod method_ = OracleMethod::kkt_enumeration;

  // The solution set as an affine piece { anchor + W t }, with t constrained
  // either by linear rows (G t <= h) or by a disk |t| <= rho. W has
  // orthonormal columns; k = 0 columns means a single point.
  PieceKind piece_ = PieceKind::samples_only;
  Vector anchor_;
  Matrix W_;
  Matrix Gt_;
  Vector ht_;
  double rho_ = 0.0;
};

/// Ground truth for min_Q f and the phi-selected solution y_star.
/// Exact for quadratic-form objectives over box / ball / simplex / halfspace /
/// affine hyperplane / whole space in dimension <= 6; otherwise falls back to
/// long GGP runs (10^7 iterations, alpha_n = n^{-1/2}, multiple starts that
/// must agree within 1e-6). Throws OracleUnavailable when neither route
/// applies.
SolutionOracle solve_oracle(const objectives::SmoothObjective& f, const geometry::ConvexSet& Q,
                            const std::optional<objectives::Regularizer>& phi);

/// Whether solve_oracle has an exact (non-iterative) route for this pair —
/// a globally quadratic objective over a ball, the whole space, or a
/// polyhedral set in dimension <= 6.
bool exact_oracle_applies(const objectives::SmoothObjective& f, const geometry::ConvexSet& Q);

/// The long-run numeric route on its own, regardless of whether an exact
/// route exists: three independent regularized runs whose limits must agree
/// within 1e-6. Used by solve_oracle as the fallback and exposed so the exact
/// routes can be cross-validated against it. Requires a regularizer.
SolutionOracle numeric_fallback_oracle(const objectives::SmoothObjective& f,
                                       const geometry::ConvexSet& Q,
                                       const std::optional<objectives::Regularizer>& phi);

/// Minimizers y_alpha of f + alpha*phi over Q for each listed alpha > 0,
/// computed exactly per alpha (the combined objective is quadratic with a
/// positive-definite Hessian, so each minimizer is unique).
std::vector<Vector> regularization_path(const objectives::SmoothObjective& f,
                                        const geometry::ConvexSet& Q,
                                        const objectives::Regularizer& phi,
                                        const std::vector<double>& alphas);

/// Scalar sequence generator for the recursion experiments.
///   zero                 0
///   constant(c)          c
///   power(c, p, shift)   c / (n + shift)^p
///   inv_log(c, shift)    c / log(n + shift)      (default shift 2)
/// Indices n start at 1.
struct SequenceSpec {
  enum class Kind { zero, constant, power, inv_log };
  Kind kind = Kind::zero;
  double coeff = 0.0;
  double exponent = 0.0;
  long shift = 0;

  static SequenceSpec zero() { return SequenceSpec{}; }
  static SequenceSpec constant(double c);
  static SequenceSpec power(double c, double p, long shift = 0);
  static SequenceSpec inv_log(double c, long shift = 2);

  double eval(long n) const;
  /// Whether the series sum diverges, decided from the generator kind.
  bool sum_diverges() const;
  bool tends_to_zero() const;
};

/// Instance of the scalar recursion
///   u_n = (1 - eps_n) u_{n-1} + eps_n r_n + delta_n,  n >= 1.
/// eps must take values in [0, 1], r and delta must be nonnegative, and
/// delta must be summable by kind.
struct LemmaFiveInstance {
  SequenceSpec eps;
  SequenceSpec r;
  SequenceSpec delta;
  double u0 = 0.0;
};

struct LemmaFiveResult {
  double final_u = 0.0;
  double tail_max_u = 0.0;   // max of u over the last 10% of indices
  double tail_sup_r = 0.0;   // sup of r over the last 10% of indices
  /// Trajectory stayed index-wise below the integrating-factor bound
  ///   u_k <= exp(-sum eps) u_0 + sum exp(-partial eps sums) eps r  (with the
  /// delta tail folded in), within relative tolerance 1e-9.
  bool within_integrating_bound = true;
  long first_bound_violation = -1;
  /// tail_max_u <= e * tail_sup_r, the limit form of the bound, evaluated at
  /// the horizon.
  bool respects_limit_bound = false;
  double empirical_ratio = 0.0;  // tail_max_u / tail_sup_r (inf when r vanishes but u does not)
};

/// Iterates the recursion to the horizon. saturate = true runs the equality
/// (worst-case) recursion; saturate = false additionally multiplies each
/// update by a seeded uniform factor in [0, 1], producing an admissible
/// sub-equality trajectory.
LemmaFiveResult lemma5_simulate(const LemmaFiveInstance& inst, long horizon, bool saturate,
                                std::uint64_t seed = 0);

/// Verdict for the almost-monotone convergence check on a finite sequence.
struct Lemma3Result {
  bool hypothesis_ok = true;   // x_{k+1} <= x_k + delta_k held at every step
  long violation_index = -1;   // first violated transition (1-based)
  bool aux_nonincreasing = true;  // u_k = x_k + tail(delta) is nonincreasing
  double limit_estimate = 0.0;    // final x value
  double error_bound = 0.0;       // declared delta tail beyond the data
};

/// Checks x_{k+1} <= x_k + delta_k over the given finite data. deltas must
/// be nonnegative with deltas.size() >= xs.size() - 1; entries beyond the
/// last transition declare the future tail and widen error_bound.
Lemma3Result lemma3_check(const std::vector<double>& xs, const std::vector<double>& deltas);

}  // namespace gptik::analysis
