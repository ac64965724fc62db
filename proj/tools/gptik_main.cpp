#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gptik/analysis.hpp"
#include "gptik/config.hpp"
#include "gptik/report.hpp"
#include "gptik/solver.hpp"

namespace {

using namespace gptik;

struct Overrides {
  std::string out;
  long seed = -1;
  long max_iter = -1;
  long log_every = -1;
  bool has_out = false;
};

void apply_overrides(config::Experiment& exp, const Overrides& ov) {
  if (ov.has_out) exp.output_dir = ov.out;
  if (ov.seed >= 0) {
    exp.seed = static_cast<std::uint64_t>(ov.seed);
    if (exp.random_starts) exp.starts = exp.set.sample(exp.seed, *exp.random_starts);
  }
  if (ov.max_iter >= 0) {
    if (ov.max_iter < 1) throw config::ConfigError("--max-iter: must be a positive integer");
    exp.stop.max_iterations = ov.max_iter;
  }
  if (ov.log_every >= 0) exp.log_every = ov.log_every;
}

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os.precision(12);
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) os << ", ";
    os << v(i);
  }
  os << "]";
  return os.str();
}

int cmd_solve(const config::Experiment& exp) {
  std::filesystem::create_directories(exp.output_dir);

  // Attach reference values when an exact oracle applies; the iterative
  // fallback oracle is only engaged by `verify`.
  solver::Targets targets;
  if (analysis::exact_oracle_applies(exp.objective, exp.set)) {
    try {
      const auto oracle = analysis::solve_oracle(exp.objective, exp.set, exp.regularizer);
      targets.f_star = oracle.f_star();
      if (oracle.y_star()) targets.y_star = *oracle.y_star();
    } catch (const analysis::OracleUnavailable&) {
      // run without gap columns
    }
  }

  std::vector<std::future<solver::RunTrace>> futures;
  for (std::size_t i = 0; i < exp.starts.size(); ++i) {
    futures.push_back(std::async(std::launch::async, [&exp, &targets, i] {
      auto p = exp.instance(i);
      return solver::run(p, exp.mode, exp.stop, solver::LogPolicy{exp.log_every}, targets);
    }));
  }

  bool aborted = false;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    const auto trace = futures[i].get();
    const auto path =
        std::filesystem::path(exp.output_dir) / ("trace_start" + std::to_string(i) + ".csv");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config::ConfigError("output_dir: cannot write " + path.string());
    solver::write_csv(trace, os);

    std::cout << "start " << i << ": ";
    switch (trace.status) {
      case solver::RunStatus::completed:
        std::cout << "completed";
        break;
      case solver::RunStatus::early_stopped:
        std::cout << "early stop (" << trace.stop_reason << ")";
        break;
      case solver::RunStatus::aborted_nonfinite:
        std::cout << "ABORTED (" << trace.stop_reason << ")";
        aborted = true;
        break;
    }
    std::cout << ", iterations " << trace.iterations << ", f = " << trace.final_f_val
              << ", x = " << format_vector(trace.final_x) << ", trace " << path.string() << "\n";
  }
  return aborted ? 2 : 0;
}

int cmd_classify(const config::Experiment& exp) {
  const double L = exp.objective.lipschitz_constant();
  const auto rep = schedules::classify(exp.schedule, L);

  std::cout << "schedule classification (L = " << L << ")\n";
  for (const auto& c : rep.witnesses) {
    const char* status = c.status == schedules::ClauseCheck::Status::pass        ? "PASS"
                         : c.status == schedules::ClauseCheck::Status::fail      ? "FAIL"
                                                                                 : "UNDECIDABLE";
    std::cout << "  [" << status << "] " << c.clause << " — " << c.witness << "\n";
  }
  auto verdict = [&](const char* name, bool v) {
    std::cout << name << ": "
              << (rep.asymptotics_decidable ? (v ? "YES" : "NO")
                                            : "SKIP (undecidable from finite schedule data)")
              << "\n";
  };
  verdict("c2", rep.satisfies_c2);
  verdict("thm2_strong", rep.satisfies_thm2_strong);
  verdict("thm2_weak", rep.satisfies_thm2_weak);
  verdict("xu_th0", rep.satisfies_xu_th0);
  return 0;
}

int cmd_verify(const config::Experiment& exp) {
  const auto rep = report::run_verify(exp);
  std::cout << report::render_text(rep);

  std::filesystem::create_directories(exp.output_dir);
  const auto path = std::filesystem::path(exp.output_dir) / "report.json";
  std::ofstream os(path, std::ios::binary);
  if (!os) throw config::ConfigError("output_dir: cannot write " + path.string());
  os << report::render_json(rep);
  std::cout << "machine-readable report: " << path.string() << "\n";
  return rep.any_aborted ? 2 : 0;
}

analysis::SequenceSpec parse_sequence(const std::string& text, const std::string& flag) {
  std::vector<std::string> parts;
  std::string cur;
  for (const char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);

  auto num = [&](std::size_t i) {
    try {
      return std::stod(parts.at(i));
    } catch (const std::exception&) {
      throw config::ConfigError(flag + ": bad number in \"" + text + "\"");
    }
  };
  auto intval = [&](std::size_t i) {
    try {
      return std::stol(parts.at(i));
    } catch (const std::exception&) {
      throw config::ConfigError(flag + ": bad integer in \"" + text + "\"");
    }
  };

  const std::string& kind = parts[0];
  try {
    if (kind == "zero" && parts.size() == 1) return analysis::SequenceSpec::zero();
    if ((kind == "const" || kind == "constant") && parts.size() == 2)
      return analysis::SequenceSpec::constant(num(1));
    if (kind == "power" && (parts.size() == 3 || parts.size() == 4))
      return analysis::SequenceSpec::power(num(1), num(2), parts.size() == 4 ? intval(3) : 0);
    if ((kind == "invlog" || kind == "inv_log") && (parts.size() == 2 || parts.size() == 3))
      return analysis::SequenceSpec::inv_log(num(1), parts.size() == 3 ? intval(2) : 2);
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(flag + ": " + e.what());
  }
  throw config::ConfigError(flag + ": expected zero | const:c | power:c:p[:shift] | invlog:c[:shift], got \"" +
                            text + "\"");
}

int cmd_lemma5(const std::string& eps, const std::string& r, const std::string& delta, double u0,
               long horizon, bool saturate, long seed) {
  analysis::LemmaFiveInstance inst;
  inst.eps = parse_sequence(eps, "--eps");
  inst.r = parse_sequence(r, "--r");
  inst.delta = parse_sequence(delta, "--delta");
  inst.u0 = u0;

  const auto res = analysis::lemma5_simulate(inst, horizon, saturate,
                                             static_cast<std::uint64_t>(seed < 0 ? 0 : seed));
  std::cout.precision(12);
  std::cout << "horizon:                  " << horizon << "\n"
            << "mode:                     " << (saturate ? "equality (worst case)" : "randomized sub-equality")
            << "\n"
            << "final_u:                  " << res.final_u << "\n"
            << "tail_max_u (last 10%):    " << res.tail_max_u << "\n"
            << "tail_sup_r (last 10%):    " << res.tail_sup_r << "\n"
            << "within_integrating_bound: " << (res.within_integrating_bound ? "yes" : "no") << "\n";
  if (res.first_bound_violation >= 0)
    std::cout << "first_bound_violation:    " << res.first_bound_violation << "\n";
  std::cout << "respects e*limsup bound:  " << (res.respects_limit_bound ? "yes" : "no") << "\n"
            << "empirical u/r ratio:      " << res.empirical_ratio << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projected gradient iterations with a vanishing strongly convex pull: "
               "experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    auto* out = sub->add_option("--out", ov.out, "output directory override");
    out->each([&](const std::string&) { ov.has_out = true; });
    sub->add_option("--seed", ov.seed, "seed override (re-samples random starts)");
    sub->add_option("--max-iter", ov.max_iter, "iteration budget override");
    sub->add_option("--log-every", ov.log_every, "trace decimation override (0 = geometric)");
    (void)needs_out;
  };

  auto* solve = app.add_subcommand("solve", "run the iteration from every start, write CSV traces");
  add_common(solve, true);
  auto* classify =
      app.add_subcommand("classify", "check the step-size schedule against the convergence regimes");
  add_common(classify, false);
  auto* verify = app.add_subcommand(
      "verify", "solve, audit the per-iteration inequalities, compare against the exact oracle");
  add_common(verify, true);

  auto* lemma5 = app.add_subcommand("lemma5", "simulate the scalar contraction recursion");
  std::string eps_text = "zero";
  std::string r_text = "zero";
  std::string delta_text = "zero";
  double u0 = 0.0;
  long horizon = 0;
  bool saturate = true;
  long l5_seed = 0;
  lemma5->add_option("--eps", eps_text, "contraction sequence (zero|const:c|power:c:p[:s]|invlog:c[:s])");
  lemma5->add_option("--r", r_text, "forcing sequence");
  lemma5->add_option("--delta", delta_text, "summable perturbation sequence");
  lemma5->add_option("--u0", u0, "initial value (>= 0)");
  lemma5->add_option("--horizon", horizon, "number of steps")->required();
  lemma5->add_flag("--saturate,!--no-saturate", saturate,
                   "run the equality recursion (default) or a randomized sub-equality one");
  lemma5->add_option("--seed", l5_seed, "seed for the sub-equality mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (lemma5->parsed()) return cmd_lemma5(eps_text, r_text, delta_text, u0, horizon, saturate, l5_seed);

    auto exp = config::load_experiment(config_path);
    apply_overrides(exp, ov);
    if (solve->parsed()) return cmd_solve(exp);
    if (classify->parsed()) return cmd_classify(exp);
    if (verify->parsed()) return cmd_verify(exp);
    std::cerr << "config error: no subcommand\n";
    return 1;
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
