#pragma once

#include <string>
#include <vector>

#include "gptik/types.hpp"

namespace gptik::schedules {

/// Step sizes for one iteration: gamma is the gradient step, alpha the
/// regularization weight. Iteration indices start at n = 1.
struct Step {
  double gamma = 0.0;
  double alpha = 0.0;
};

/// Step-size schedule (gamma_n, alpha_n), n >= 1.
///
///   power_law:  gamma_n = A / n^gamma_exp,  alpha_n = B / n^alpha_exp
///   constant:   power_law with gamma_exp = 0 (gamma_n = A for all n)
///   tabulated:  finite explicit tables; asymptotic properties undecidable
class Schedule {
 public:
  enum class Kind { power_law, constant, tabulated };

  static Schedule power_law(double A, double gamma_exp, double B, double alpha_exp);
  static Schedule constant(double gamma, double B, double alpha_exp);
  static Schedule tabulated(std::vector<double> gammas, std::vector<double> alphas);

  Kind kind() const { return kind_; }

  /// (gamma_n, alpha_n). Requires n >= 1; a tabulated schedule additionally
  /// requires n <= table size (std::out_of_range otherwise).
  Step at(long n) const;

  /// True iff alpha_{n+1} <= alpha_n for all n < horizon (non-strict). A
  /// tabulated schedule is checked over min(horizon, table size).
  bool is_alpha_decreasing(long horizon) const;

  // power_law / constant accessors
  double coeff_gamma() const { return A_; }
  double gamma_exp() const { return gamma_exp_; }
  double coeff_alpha() const { return B_; }
  double alpha_exp() const { return alpha_exp_; }

  long table_size() const { return static_cast<long>(gammas_.size()); }

 private:
  Schedule() = default;

  Kind kind_ = Kind::power_law;
  double A_ = 0.0, gamma_exp_ = 0.0, B_ = 0.0, alpha_exp_ = 0.0;
  std::vector<double> gammas_, alphas_;
};

/// One checked hypothesis clause with human-readable evidence.
struct ClauseCheck {
  enum class Status { pass, fail, undecidable };
  std::string clause;
  Status status = Status::fail;
  std::string witness;
};

/// Which convergence-theorem hypotheses the schedule satisfies for a given
/// gradient Lipschitz constant L_f. Asymptotic clauses are decided exactly
/// from the power-law exponents; finite tables cannot decide them
/// (asymptotics_decidable = false and the flags stay false).
struct ConditionReport {
  bool satisfies_c2 = false;           // 0 < liminf gamma <= limsup gamma < 2/L_f
  bool satisfies_thm2_strong = false;  // limsup clause + alpha dec. to 0 + sum gamma*alpha = inf
  bool satisfies_thm2_weak = false;    // limsup clause + alpha dec. to 0 + sum gamma = inf
                                       //   + sum gamma*alpha < inf
  bool satisfies_xu_th0 = false;       // exponent regime 0 < alpha_exp < gamma_exp,
                                       //   2*alpha_exp + gamma_exp < 1
  bool asymptotics_decidable = true;
  std::vector<ClauseCheck> witnesses;
};

/// Classifies the schedule against the convergence hypotheses. L_f >= 0 is
/// the gradient Lipschitz constant of the objective; L_f = 0 makes the upper
/// step bound 2/L_f vacuous.
ConditionReport classify(const Schedule& s, double L_f);

/// min over 1 <= n <= horizon of (1/gamma_n - L_n/2), L_n = L_f + alpha_n*L_phi.
/// Positive margins certify the per-step descent inequality from that index
/// range. A tabulated schedule is scanned over min(horizon, table size).
double nu_margin(const Schedule& s, double L_f, double L_phi, long horizon);

}  // namespace gptik::schedules
