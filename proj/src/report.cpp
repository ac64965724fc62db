#include "gptik/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gptik/analysis.hpp"
#include "json.hpp"

namespace gptik::report {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt6(double v) {
  if (std::isnan(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Row make_row(std::string name, std::string status, double value = kNaN, double threshold = kNaN,
             std::string detail = "") {
  Row r;
  r.name = std::move(name);
  r.status = std::move(status);
  r.value = value;
  r.threshold = threshold;
  r.detail = std::move(detail);
  return r;
}

const char* method_name(analysis::OracleMethod m) {
  switch (m) {
    case analysis::OracleMethod::closed_form:
      return "closed_form";
    case analysis::OracleMethod::kkt_enumeration:
      return "kkt_enumeration";
    case analysis::OracleMethod::long_run_numeric:
      return "long_run_numeric";
  }
  return "?";
}

}  // namespace

ReproductionReport run_verify(const config::Experiment& exp) {
  ReproductionReport rep;
  const double L_f = exp.objective.lipschitz_constant();

  // Schedule classification.
  const auto cls = schedules::classify(exp.schedule, L_f);
  auto class_row = [&](const char* name, bool val) {
    if (cls.asymptotics_decidable) {
      rep.rows.push_back(make_row(name, "INFO", kNaN, kNaN, val ? "YES" : "NO"));
    } else {
      rep.rows.push_back(make_row(name, "SKIP", kNaN, kNaN, "undecidable from finite schedule data"));
    }
  };
  class_row("classify: c2", cls.satisfies_c2);
  class_row("classify: thm2_strong", cls.satisfies_thm2_strong);
  class_row("classify: thm2_weak", cls.satisfies_thm2_weak);
  class_row("classify: xu_th0", cls.satisfies_xu_th0);

  const bool strong_regime = cls.asymptotics_decidable && cls.satisfies_thm2_strong &&
                             exp.mode == solver::Mode::ggp && exp.regularizer.has_value();

  // Independent ground truth.
  std::optional<analysis::SolutionOracle> oracle;
  std::string oracle_msg;
  try {
    oracle = analysis::solve_oracle(exp.objective, exp.set, exp.regularizer);
  } catch (const analysis::OracleUnavailable& e) {
    oracle_msg = e.what();
  }
  if (oracle) {
    rep.rows.push_back(
        make_row("oracle", "INFO", oracle->f_star(), kNaN,
                 std::string("method ") + method_name(oracle->method())));
  } else {
    rep.rows.push_back(make_row("oracle", "SKIP", kNaN, kNaN, oracle_msg));
  }

  solver::Targets targets;
  if (oracle) {
    targets.f_star = oracle->f_star();
    if (oracle->y_star()) targets.y_star = *oracle->y_star();
  }

  // One run per start.
  std::vector<solver::RunTrace> traces;
  for (std::size_t i = 0; i < exp.starts.size(); ++i) {
    auto p = exp.instance(i);
    auto tr = solver::run(p, exp.mode, exp.stop, solver::LogPolicy{exp.log_every}, targets);
    const std::string name = "run[" + std::to_string(i) + "] status";
    if (tr.status == solver::RunStatus::aborted_nonfinite) {
      rep.any_aborted = true;
      rep.rows.push_back(make_row(name, "FAIL", static_cast<double>(tr.iterations), kNaN,
                                  "aborted: " + tr.stop_reason));
    } else {
      rep.rows.push_back(make_row(name, "INFO", static_cast<double>(tr.iterations), kNaN,
                                  tr.stop_reason.empty() ? "completed" : tr.stop_reason));
    }
    traces.push_back(std::move(tr));
  }

  // Oracle comparisons over the final iterates.
  if (oracle) {
    double max_gap = 0.0;
    double max_dist_set = 0.0;
    for (const auto& tr : traces) {
      max_gap = std::max(max_gap, tr.final_f_val - oracle->f_star());
      max_dist_set = std::max(max_dist_set, oracle->distance_to(tr.final_x));
    }
    const double gap_tol = exp.verify.f_gap.value_or(1e-6 * (1.0 + std::abs(oracle->f_star())));
    rep.rows.push_back(make_row("f_gap_final", max_gap <= gap_tol ? "PASS" : "FAIL", max_gap,
                                gap_tol, "max over starts"));
    const double set_tol = exp.verify.dist_to_set.value_or(1e-4);
    std::string set_note = "max over starts";
    if (oracle->method() == analysis::OracleMethod::long_run_numeric)
      set_note += " (nearest-sample distance)";
    rep.rows.push_back(make_row("dist_to_set_final", max_dist_set <= set_tol ? "PASS" : "FAIL",
                                max_dist_set, set_tol, set_note));

    if (oracle->y_star()) {
      double max_dist_target = 0.0;
      for (const auto& tr : traces)
        max_dist_target = std::max(max_dist_target, (tr.final_x - *oracle->y_star()).norm());
      if (strong_regime) {
        const double tol = exp.verify.dist_to_target.value_or(1e-2);
        rep.rows.push_back(make_row("dist_to_target_final",
                                    max_dist_target <= tol ? "PASS" : "FAIL", max_dist_target,
                                    tol, "max over starts"));
      } else {
        rep.rows.push_back(make_row("dist_to_target_final", "N/A", max_dist_target, kNaN,
                                    "strong-selection regime not established for this run"));
      }
    } else {
      rep.rows.push_back(
          make_row("dist_to_target_final", "N/A", kNaN, kNaN, "no regularizer, no selected point"));
    }
  } else {
    rep.rows.push_back(make_row("f_gap_final", "SKIP", kNaN, kNaN, "oracle unavailable"));
    rep.rows.push_back(make_row("dist_to_set_final", "SKIP", kNaN, kNaN, "oracle unavailable"));
    rep.rows.push_back(make_row("dist_to_target_final", "SKIP", kNaN, kNaN, "oracle unavailable"));
  }

  if (exp.starts.size() >= 2) {
    double spread = 0.0;
    for (std::size_t i = 0; i < traces.size(); ++i)
      for (std::size_t j = i + 1; j < traces.size(); ++j)
        spread = std::max(spread, (traces[i].final_x - traces[j].final_x).norm());
    if (strong_regime) {
      const double tol = exp.verify.spread.value_or(1e-2);
      rep.rows.push_back(make_row("inter_start_spread", spread <= tol ? "PASS" : "FAIL", spread,
                                  tol, "max pairwise distance among final iterates"));
    } else {
      rep.rows.push_back(make_row("inter_start_spread", "INFO", spread, kNaN,
                                  "limit may legitimately depend on the start in this regime"));
    }
  } else {
    rep.rows.push_back(make_row("inter_start_spread", "INFO", kNaN, kNaN, "single start"));
  }

  // Per-iteration inequality audits on a densely logged prefix of the first
  // start.
  const long prefix = std::min<long>(exp.stop.max_iterations, 10'000);
  auto p0 = exp.instance(0);
  solver::StopRule prefix_stop;
  prefix_stop.max_iterations = prefix;
  const auto dense =
      solver::run(p0, exp.mode, prefix_stop, solver::LogPolicy::dense(), targets);
  const long n0 = solver::first_positive_nu(dense);

  if (n0 < 0) {
    rep.rows.push_back(make_row("phi_monotonicity", "SKIP", kNaN, kNaN,
                                "no index with positive step margin on the audited prefix"));
  } else {
    const auto mono = solver::phi_monotonicity_violations(dense);
    long after = 0;
    long before = 0;
    for (const auto& v : mono) (v.n >= n0 ? after : before)++;
    std::string detail = "audited prefix of " + std::to_string(prefix) +
                         " iterations, first positive-margin index " + std::to_string(n0);
    if (before > 0)
      detail += "; " + std::to_string(before) + " earlier violations reported, not fatal";
    rep.rows.push_back(make_row("phi_monotonicity", after == 0 ? "PASS" : "FAIL",
                                static_cast<double>(after), 0.0, detail));
  }

  if (!oracle) {
    rep.rows.push_back(make_row("fejer_audit", "SKIP", kNaN, kNaN, "oracle unavailable"));
  } else if (n0 < 0) {
    rep.rows.push_back(make_row("fejer_audit", "SKIP", kNaN, kNaN,
                                "no index with positive step margin on the audited prefix"));
  } else {
    const Vector x_ref =
        oracle->y_star() ? *oracle->y_star() : oracle->project_onto_set(dense.final_x);
    const auto viol = solver::fejer_audit(p0, dense, x_ref);
    long after = 0;
    long before = 0;
    for (const auto& v : viol) (v.n >= n0 ? after : before)++;
    std::string detail = "one-step bound against the reference minimizer";
    if (before > 0)
      detail += "; " + std::to_string(before) + " violations before the positive-margin index";
    rep.rows.push_back(make_row("fejer_audit", after == 0 ? "PASS" : "FAIL",
                                static_cast<double>(after), 0.0, detail));
  }

  if (!dense.rows.empty() && dense.total_step_sq > 0.0) {
    const long half = dense.iterations / 2;
    double cum_half = 0.0;
    for (const auto& row : dense.rows)
      if (row.n <= half) cum_half = row.cum_step_sq;
    const double frac = (dense.total_step_sq - cum_half) / dense.total_step_sq;
    rep.rows.push_back(make_row("step_sq_tail_fraction", "INFO", frac, kNaN,
                                "share of the squared-step mass in the second half of the prefix"));
  }

  return rep;
}

std::string render_text(const ReproductionReport& rep) {
  std::ostringstream os;
  std::size_t name_w = 4;
  for (const auto& r : rep.rows) name_w = std::max(name_w, r.name.size());
  os << "status  " << std::string(name_w - 4, ' ') << "name  value         threshold     detail\n";
  for (const auto& r : rep.rows) {
    std::string status = r.status;
    status.resize(6, ' ');
    std::string name = r.name;
    name.resize(name_w, ' ');
    std::string value = fmt6(r.value);
    value.resize(std::max<std::size_t>(value.size(), 12), ' ');
    std::string thr = fmt6(r.threshold);
    thr.resize(std::max<std::size_t>(thr.size(), 12), ' ');
    os << status << "  " << name << "  " << value << "  " << thr << "  " << r.detail << "\n";
  }
  os << (rep.all_passed() ? "RESULT: no failing rows\n" : "RESULT: failing rows present\n");
  return os.str();
}

std::string render_json(const ReproductionReport& rep) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json row;
    row["name"] = r.name;
    row["status"] = r.status;
    row["value"] = std::isnan(r.value) ? nlohmann::json() : nlohmann::json(r.value);
    row["threshold"] = std::isnan(r.threshold) ? nlohmann::json() : nlohmann::json(r.threshold);
    row["detail"] = r.detail;
    j["rows"].push_back(row);
  }
  j["all_passed"] = rep.all_passed();
  j["any_aborted"] = rep.any_aborted;
  return j.dump(2) + "\n";
}

}  // namespace gptik::report
