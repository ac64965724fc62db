#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gptik/geometry.hpp"
#include "gptik/objectives.hpp"
#include "gptik/schedules.hpp"
#include "gptik/types.hpp"

namespace gptik::solver {

/// gp:  x_{n+1} = P_Q(x_n - gamma_n grad f(x_n))
/// ggp: x_{n+1} = P_Q(x_n - gamma_n grad f(x_n) - gamma_n alpha_n grad phi(x_n))
enum class Mode { gp, ggp };

/// A constrained problem plus its step-size schedule and start point.
/// Construction validates dimensions and projects x0 onto Q.
struct ProblemInstance {
  objectives::SmoothObjective f;
  geometry::ConvexSet Q;
  std::optional<objectives::Regularizer> phi;
  schedules::Schedule schedule;
  Vector x0;

  static ProblemInstance make(objectives::SmoothObjective f, geometry::ConvexSet Q,
                              std::optional<objectives::Regularizer> phi,
                              schedules::Schedule schedule, const Vector& x0);
};

struct StopRule {
  long max_iterations = 0;
  /// When positive: stop once |x_{n+1} - x_n| / gamma_n < step_tolerance at 10
  /// consecutive logged iterations. Under ggp the check is suspended while
  /// alpha_n > step_tolerance (the regularization pull has not faded yet).
  double step_tolerance = 0.0;
  std::optional<double> wall_clock_seconds;
};

/// Which iterations get a trace row. every = 1 logs densely, every = k >= 2
/// logs each k-th iteration, every = 0 selects geometric decimation: every
/// iteration while n < 1000, then every ceil(n/1000)-th.
struct LogPolicy {
  long every = 0;
  static LogPolicy dense() { return LogPolicy{1}; }
  static LogPolicy geometric() { return LogPolicy{0}; }
  static LogPolicy every_k(long k) { return LogPolicy{k}; }
  bool should_log(long n) const;
};

/// Reference values supplied by an external oracle; the solver itself never
/// assumes them. Present values enable the gap columns of the trace.
struct Targets {
  std::optional<double> f_star;
  std::optional<Vector> y_star;
};

/// State at the start of iteration n plus the step the iteration took.
/// Quantities that need an absent regularizer or oracle are NaN (emitted as
/// empty CSV fields).
struct TraceRow {
  long n = 0;
  double gamma = 0.0;
  double alpha = 0.0;
  double f_val = 0.0;
  double phi_val = 0.0;         // phi(x_n)
  double Phi_val = 0.0;         // f(x_n) + alpha_n (phi(x_n) - phi_star)
  double step_norm = 0.0;       // |x_{n+1} - x_n|
  double f_gap = 0.0;           // f(x_n) - f_star
  double dist_to_target = 0.0;  // |x_n - y_star|
  double nu = 0.0;              // 1/gamma_n - (L_f + alpha_n L_phi)/2
  double cum_step_sq = 0.0;     // sum of squared step norms through iteration n
  Vector x;
};

enum class RunStatus { completed, early_stopped, aborted_nonfinite };

struct RunTrace {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::completed;
  std::string stop_reason;
  long iterations = 0;  // iterations actually executed
  Vector final_x;       // last good iterate
  double final_f_val = 0.0;
  double total_step_sq = 0.0;
  double phi_star = 0.0;  // inf of phi over Q (0 without a regularizer)
  Targets targets;
  long log_every = 0;  // echo of the log policy

  bool dense() const { return log_every == 1; }
  /// f(final_x) - f_star; requires a f_star target.
  double final_f_gap() const;
  /// |final_x - y_star|; requires a y_star target.
  double final_dist_to_target() const;
};

/// One gradient-projection step x -> P_Q(x - gamma_n grad f(x)).
Vector gp_step(const ProblemInstance& p, const Vector& x, long n);

/// One regularized step x -> P_Q(x - gamma_n grad f(x) - gamma_n alpha_n grad phi(x)).
/// Requires a regularizer on the instance.
Vector ggp_step(const ProblemInstance& p, const Vector& x, long n);

/// Iterates from p.x0 under the given mode until the stop rule fires, the
/// iteration budget is exhausted, or a tabulated schedule runs out. A
/// non-finite gradient, candidate, or logged value aborts the run with the
/// last good iterate kept and status aborted_nonfinite.
RunTrace run(const ProblemInstance& p, Mode mode, const StopRule& stop, const LogPolicy& log,
             const Targets& targets = {});

/// A logged iteration where the one-step quasi-nonexpansiveness bound
///   |x_{n+1}-x_ref|^2 + 2 gamma_n (Phi_{n+1}(x_{n+1}) - f_star)
///     <= |x_n-x_ref|^2 + 2 gamma_n alpha_n (phi(x_ref)-phi_star)
///        + gamma_n L_n |x_{n+1}-x_n|^2
/// failed beyond tolerance 1e-8 (1 + |x_n|^2).
struct FejerViolation {
  long n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Audits the bound above at every consecutive pair of trace rows against a
/// reference solution x_ref (a minimizer of f over Q, supplied by an oracle).
/// Requires a densely logged trace (log_every = 1) and a f_star target.
std::vector<FejerViolation> fejer_audit(const ProblemInstance& p, const RunTrace& trace,
                                        const Vector& x_ref);

/// A logged pair where Phi_{n+1}(x_{n+1}) > Phi_n(x_n) beyond tolerance
/// 1e-9 (1 + |Phi_n(x_n)|). Expected to be empty from the first index with
/// nu > 0 onward.
struct MonotonicityViolation {
  long n = 0;  // the earlier index of the offending pair
  double before = 0.0;
  double after = 0.0;
};

std::vector<MonotonicityViolation> phi_monotonicity_violations(const RunTrace& trace);

/// First logged index with nu > 0, or -1 when none.
long first_positive_nu(const RunTrace& trace);

/// Writes the trace as CSV with the fixed header
///   n,gamma,alpha,f_val,phi_val,Phi_n,step_norm,f_gap,dist_to_target,nu_n
/// Doubles are rendered as shortest round-trip decimals; NaN fields (absent
/// regularizer or oracle) are emitted empty. Output is byte-deterministic
/// for identical runs.
void write_csv(const RunTrace& trace, std::ostream& os);
std::string to_csv(const RunTrace& trace);

}  // namespace gptik::solver
