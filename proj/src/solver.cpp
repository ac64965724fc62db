#include "gptik/solver.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

namespace gptik::solver {

namespace {

void check_instance(const ProblemInstance& p) {
  if (p.f.dim() != p.Q.dim()) {
    throw std::invalid_argument("problem: objective/set dimension mismatch");
  }
  if (p.phi && p.phi->dim() != p.Q.dim()) {
    throw std::invalid_argument("problem: regularizer dimension mismatch");
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void append_field(std::string& line, double v) {
  if (!std::isnan(v)) line += format_double(v);
}

}  // namespace

ProblemInstance ProblemInstance::make(objectives::SmoothObjective f, geometry::ConvexSet Q,
                                      std::optional<objectives::Regularizer> phi,
                                      schedules::Schedule schedule, const Vector& x0) {
  require_vector(x0, Q.dim(), "x0");
  ProblemInstance p{std::move(f), std::move(Q), std::move(phi), std::move(schedule),
                    Vector()};
  check_instance(p);
  p.x0 = p.Q.project(x0);
  return p;
}

bool LogPolicy::should_log(long n) const {
  if (every >= 1) return n % every == 0;
  if (n < 1000) return true;
  const long stride = (n + 999) / 1000;
  return n % stride == 0;
}

double RunTrace::final_f_gap() const {
  if (!targets.f_star) throw std::logic_error("final_f_gap: no f_star target attached");
  return final_f_val - *targets.f_star;
}

double RunTrace::final_dist_to_target() const {
  if (!targets.y_star) throw std::logic_error("final_dist_to_target: no y_star target attached");
  return (final_x - *targets.y_star).norm();
}

Vector gp_step(const ProblemInstance& p, const Vector& x, long n) {
  require_vector(x, p.Q.dim(), "gp_step x");
  const auto st = p.schedule.at(n);
  return p.Q.project(x - st.gamma * p.f.gradient(x));
}

Vector ggp_step(const ProblemInstance& p, const Vector& x, long n) {
  require_vector(x, p.Q.dim(), "ggp_step x");
  if (!p.phi) throw std::invalid_argument("ggp_step: instance has no regularizer");
  const auto st = p.schedule.at(n);
  return p.Q.project(x - st.gamma * p.f.gradient(x) -
                     (st.gamma * st.alpha) * p.phi->gradient(x));
}

RunTrace run(const ProblemInstance& p, Mode mode, const StopRule& stop, const LogPolicy& log,
             const Targets& targets) {
  check_instance(p);
  if (stop.max_iterations < 1) throw std::invalid_argument("stop: max_iterations must be >= 1");
  if (stop.step_tolerance < 0.0 || !std::isfinite(stop.step_tolerance)) {
    throw std::invalid_argument("stop: step_tolerance must be nonnegative and finite");
  }
  if (log.every < 0) throw std::invalid_argument("log_every: must be nonnegative");
  if (mode == Mode::ggp && !p.phi) throw std::invalid_argument("run: ggp mode needs a regularizer");
  if (targets.y_star) require_vector(*targets.y_star, p.Q.dim(), "targets y_star");

  RunTrace trace;
  trace.targets = targets;
  trace.log_every = log.every;
  trace.phi_star = p.phi ? p.phi->min_over(p.Q) : 0.0;

  const double L_f = p.f.lipschitz_constant();
  const double L_phi = p.phi ? p.phi->lipschitz_constant() : 0.0;
  const bool tik = (mode == Mode::ggp);
  const long table_limit =
      (p.schedule.kind() == schedules::Schedule::Kind::tabulated) ? p.schedule.table_size() : 0;

  const auto t_start = std::chrono::steady_clock::now();
  Vector x = p.x0;
  double cum_step_sq = 0.0;
  int quiet_checks = 0;

  for (long n = 1; n <= stop.max_iterations; ++n) {
    if (table_limit > 0 && n > table_limit) {
      trace.stop_reason = "tabulated schedule exhausted";
      break;
    }
    const auto st = p.schedule.at(n);

    Vector pull = st.gamma * p.f.gradient(x);
    if (tik) pull += (st.gamma * st.alpha) * p.phi->gradient(x);
    if (!pull.allFinite()) {
      trace.status = RunStatus::aborted_nonfinite;
      trace.stop_reason = "non-finite gradient at n = " + std::to_string(n);
      break;
    }
    const Vector x_next = p.Q.project(x - pull);

    const double step_norm = (x_next - x).norm();
    cum_step_sq += step_norm * step_norm;

    if (log.should_log(n)) {
      TraceRow row;
      row.n = n;
      row.gamma = st.gamma;
      row.alpha = st.alpha;
      row.f_val = p.f.value(x);
      row.phi_val = p.phi ? p.phi->value(x) : std::nan("");
      row.Phi_val = p.phi ? row.f_val + st.alpha * (row.phi_val - trace.phi_star) : std::nan("");
      row.step_norm = step_norm;
      row.f_gap = targets.f_star ? row.f_val - *targets.f_star : std::nan("");
      row.dist_to_target = targets.y_star ? (x - *targets.y_star).norm() : std::nan("");
      row.nu = 1.0 / st.gamma - 0.5 * (L_f + st.alpha * L_phi);
      row.cum_step_sq = cum_step_sq;
      row.x = x;
      if (!std::isfinite(row.f_val) || (p.phi && !std::isfinite(row.phi_val))) {
        trace.status = RunStatus::aborted_nonfinite;
        trace.stop_reason = "non-finite objective value at n = " + std::to_string(n);
        break;
      }
      trace.rows.push_back(std::move(row));

      // Early stop: 10 consecutive quiet logged checks. When the Tikhonov
      // pull is active the check stays disarmed until the regularization
      // weight has dropped to the tolerance scale, since the drift it causes
      // keeps steps artificially small long before the iterates settle.
      if (stop.step_tolerance > 0.0 && (!tik || st.alpha <= stop.step_tolerance)) {
        if (step_norm / st.gamma < stop.step_tolerance) {
          if (++quiet_checks >= 10) {
            x = x_next;
            trace.iterations = n;
            trace.status = RunStatus::early_stopped;
            trace.stop_reason = "step norm below tolerance at 10 consecutive logged checks";
            break;
          }
        } else {
          quiet_checks = 0;
        }
      }
    }

    x = x_next;
    trace.iterations = n;

    if (stop.wall_clock_seconds && (n & 0xfff) == 0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t_start;
      if (elapsed.count() > *stop.wall_clock_seconds) {
        trace.status = RunStatus::early_stopped;
        trace.stop_reason = "wall clock limit reached";
        break;
      }
    }
  }

  trace.final_x = x;
  trace.final_f_val = p.f.value(x);
  trace.total_step_sq = cum_step_sq;
  return trace;
}

std::vector<FejerViolation> fejer_audit(const ProblemInstance& p, const RunTrace& trace,
                                        const Vector& x_ref) {
  if (!trace.dense()) {
    throw std::invalid_argument("fejer_audit: requires a densely logged trace (log_every = 1)");
  }
  if (!trace.targets.f_star) {
    throw std::invalid_argument("fejer_audit: missing oracle reference (f_star target)");
  }
  require_vector(x_ref, p.Q.dim(), "fejer_audit x_ref");
  if (!p.Q.contains(x_ref, 1e-9)) {
    throw std::invalid_argument("fejer_audit: x_ref must lie in Q");
  }

  const double f_star = *trace.targets.f_star;
  const double L_f = p.f.lipschitz_constant();
  const double L_phi = p.phi ? p.phi->lipschitz_constant() : 0.0;
  const double phi_ref_gap = p.phi ? p.phi->value(x_ref) - trace.phi_star : 0.0;

  std::vector<FejerViolation> violations;
  for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
    const TraceRow& cur = trace.rows[i];
    const TraceRow& next = trace.rows[i + 1];
    if (next.n != cur.n + 1) {
      throw std::invalid_argument("fejer_audit: trace rows are not consecutive");
    }
    const double Phi_next = std::isnan(next.Phi_val) ? next.f_val : next.Phi_val;
    const double L_n = L_f + cur.alpha * L_phi;
    const double lhs = (next.x - x_ref).squaredNorm() + 2.0 * cur.gamma * (Phi_next - f_star);
    const double rhs = (cur.x - x_ref).squaredNorm() + 2.0 * cur.gamma * cur.alpha * phi_ref_gap +
                       cur.gamma * L_n * cur.step_norm * cur.step_norm;
    const double tol = 1e-8 * (1.0 + cur.x.squaredNorm());
    if (lhs > rhs + tol) violations.push_back(FejerViolation{cur.n, lhs, rhs});
  }
  return violations;
}

std::vector<MonotonicityViolation> phi_monotonicity_violations(const RunTrace& trace) {
  std::vector<MonotonicityViolation> violations;
  for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
    const TraceRow& cur = trace.rows[i];
    const TraceRow& next = trace.rows[i + 1];
    const double before = std::isnan(cur.Phi_val) ? cur.f_val : cur.Phi_val;
    const double after = std::isnan(next.Phi_val) ? next.f_val : next.Phi_val;
    if (after > before + 1e-9 * (1.0 + std::abs(before))) {
      violations.push_back(MonotonicityViolation{cur.n, before, after});
    }
  }
  return violations;
}

long first_positive_nu(const RunTrace& trace) {
  for (const TraceRow& row : trace.rows) {
    if (row.nu > 0.0) return row.n;
  }
  return -1;
}

void write_csv(const RunTrace& trace, std::ostream& os) {
  std::string out;
  out.reserve(64 * (trace.rows.size() + 1));
  out += "n,gamma,alpha,f_val,phi_val,Phi_n,step_norm,f_gap,dist_to_target,nu_n\n";
  for (const TraceRow& row : trace.rows) {
    out += std::to_string(row.n);
    out += ',';
    append_field(out, row.gamma);
    out += ',';
    append_field(out, row.alpha);
    out += ',';
    append_field(out, row.f_val);
    out += ',';
    append_field(out, row.phi_val);
    out += ',';
    append_field(out, row.Phi_val);
    out += ',';
    append_field(out, row.step_norm);
    out += ',';
    append_field(out, row.f_gap);
    out += ',';
    append_field(out, row.dist_to_target);
    out += ',';
    append_field(out, row.nu);
    out += '\n';
  }
  os << out;
}

std::string to_csv(const RunTrace& trace) {
  std::ostringstream os;
  write_csv(trace, os);
  return os.str();
}

}  // namespace gptik::solver
