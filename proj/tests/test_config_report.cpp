#include "gptik/config.hpp"
#include "gptik/report.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace gptik;
using config::ConfigError;
using config::Experiment;
using config::parse_experiment_text;
using report::ReproductionReport;
using testutil::vec;

namespace {

void expect_config_error(const std::string& text, const std::string& needle) {
  try {
    (void)parse_experiment_text(text);
    FAIL_CHECK("expected ConfigError containing \"" << needle << "\"");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK_MESSAGE(msg.find(needle) != std::string::npos,
                  "message \"" << msg << "\" lacks \"" << needle << "\"");
  }
}

const report::Row* find_row(const ReproductionReport& rep, const std::string& name) {
  for (const auto& r : rep.rows)
    if (r.name == name) return &r;
  return nullptr;
}

const char* kSegmentConfig = R"({
  "problem": {
    "objective": {"kind": "least_squares", "M": [[1, 1]], "y": [2]},
    "set": {"kind": "box", "lower": [0, 0], "upper": [10, 10]},
    "regularizer": {"kind": "half_squared_norm"}
  },
  "schedule": {"kind": "constant", "gamma": 0.5, "B": 1.0, "alpha_exp": 0.5},
  "mode": "GGP",
  "starts": [[4, 0], [0, 4]],
  "stop": {"max_iterations": 20000},
  "log_every": 0,
  "seed": 7,
  "verify": {"f_gap_tol": 1e-3, "dist_to_set_tol": 1e-2}
})";

}  // namespace

TEST_CASE("full config round-trip") {
  const auto exp = parse_experiment_text(kSegmentConfig);
  CHECK(exp.objective.dim() == 2);
  CHECK(exp.set.dim() == 2);
  CHECK(exp.regularizer.has_value());
  CHECK(exp.mode == solver::Mode::ggp);
  REQUIRE(exp.starts.size() == 2);
  CHECK((exp.starts[0] - vec({4, 0})).norm() == 0.0);
  CHECK(exp.stop.max_iterations == 20000);
  CHECK(exp.stop.step_tolerance == 0.0);
  CHECK_FALSE(exp.stop.wall_clock_seconds.has_value());
  CHECK(exp.log_every == 0);
  CHECK(exp.seed == 7);
  CHECK(exp.output_dir == ".");
  REQUIRE(exp.verify.f_gap.has_value());
  CHECK(*exp.verify.f_gap == 1e-3);
  CHECK_FALSE(exp.verify.dist_to_target.has_value());
  REQUIRE(exp.verify.dist_to_set.has_value());
  CHECK(*exp.verify.dist_to_set == 1e-2);

  const auto st = exp.schedule.at(4);
  CHECK(st.gamma == 0.5);
  CHECK(st.alpha == 0.5);
}

TEST_CASE("constant schedule defaults and optional fields") {
  const auto exp = parse_experiment_text(R"({
    "problem": {
      "objective": {"kind": "quadratic", "A": [[1, 0], [0, 1]], "b": [1, 1]},
      "set": {"kind": "ball", "center": [0, 0], "radius": 2.0},
      "regularizer": null
    },
    "schedule": {"kind": "constant", "gamma": 0.25},
    "mode": "GP",
    "starts": [[1, 0]],
    "stop": {"max_iterations": 100, "step_tolerance": 1e-9, "wall_clock_seconds": 5.0}
  })");
  CHECK_FALSE(exp.regularizer.has_value());
  CHECK(exp.mode == solver::Mode::gp);
  // Omitted B and alpha_exp default to 1: alpha_n = 1/n.
  CHECK(exp.schedule.at(4).gamma == 0.25);
  CHECK(exp.schedule.at(4).alpha == 0.25);
  CHECK(exp.stop.step_tolerance == 1e-9);
  REQUIRE(exp.stop.wall_clock_seconds.has_value());
  CHECK(*exp.stop.wall_clock_seconds == 5.0);
  CHECK(exp.seed == 0);
}

TEST_CASE("translated objective and tabulated schedule parse") {
  const auto exp = parse_experiment_text(R"({
    "problem": {
      "objective": {"kind": "translated",
                    "base": {"kind": "huberized_norm", "dim": 2, "delta": 0.5},
                    "shift": [1, 1]},
      "set": {"kind": "simplex", "dim": 2, "scale": 1.0}
    },
    "schedule": {"kind": "tabulated", "gammas": [0.5, 0.4], "alphas": [1.0, 0.5]},
    "mode": "GP",
    "starts": [[1, 0]],
    "stop": {"max_iterations": 2}
  })");
  CHECK(exp.objective.value(vec({1, 1})) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(exp.schedule.at(2).gamma == 0.4);
  CHECK_THROWS_AS(exp.schedule.at(3), std::out_of_range);
}

TEST_CASE("random starts are seeded and deterministic") {
  const std::string base = R"({
    "problem": {
      "objective": {"kind": "least_squares", "M": [[1, 1]], "y": [2]},
      "set": {"kind": "box", "lower": [0, 0], "upper": [10, 10]}
    },
    "schedule": {"kind": "constant", "gamma": 0.5},
    "mode": "GP",
    "starts": {"random": 3},
    "stop": {"max_iterations": 10},
    "seed": SEED
  })";
  auto with_seed = [&](const std::string& s) {
    std::string t = base;
    t.replace(t.find("SEED"), 4, s);
    return parse_experiment_text(t);
  };
  const auto a = with_seed("11");
  const auto b = with_seed("11");
  const auto c = with_seed("12");
  REQUIRE(a.starts.size() == 3);
  REQUIRE(a.random_starts.has_value());
  CHECK(*a.random_starts == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK((a.starts[i] - b.starts[i]).norm() == 0.0);
    CHECK(a.set.contains(a.starts[i], 1e-12));
  }
  bool differs = false;
  for (std::size_t i = 0; i < 3; ++i)
    if ((a.starts[i] - c.starts[i]).norm() > 0.0) differs = true;
  CHECK(differs);
}

TEST_CASE("instance building projects the start") {
  auto exp = parse_experiment_text(kSegmentConfig);
  exp.starts[0] = vec({-3, 11});
  const auto p = exp.instance(0);
  CHECK((p.x0 - vec({0, 10})).norm() == 0.0);
  CHECK_THROWS_AS(exp.instance(5), std::invalid_argument);
}

TEST_CASE("config errors cite the offending field") {
  expect_config_error("{", "config: invalid JSON");
  expect_config_error("{}", "config.problem: missing");
  expect_config_error(R"({"problem": {}})", "problem.objective: missing");
  expect_config_error(R"({
    "problem": {"objective": {"kind": "banana"},
                "set": {"kind": "whole_space", "dim": 1}}})",
                      "problem.objective.kind: unknown objective kind");
  expect_config_error(R"({
    "problem": {"objective": {"kind": "least_squares", "M": [[1, 1]], "y": [2]},
                "set": {"kind": "ball", "center": [0, 0], "radius": -1}}})",
                      "problem.set.radius: must be positive");
  expect_config_error(R"({
    "problem": {"objective": {"kind": "least_squares", "M": [[1, 1]], "y": [2]},
                "set": {"kind": "box", "lower": [1, 1], "upper": [0, 0]}}})",
                      "problem.set:");
  expect_config_error(R"({
    "problem": {"objective": {"kind": "least_squares", "M": [[1, 1]], "y": [2]},
                "set": {"kind": "whole_space", "dim": 3}}})",
                      "objective dimension 2 does not match set dimension 3");

  const std::string good_problem = R"("problem": {
    "objective": {"kind": "least_squares", "M": [[1, 1]], "y": [2]},
    "set": {"kind": "box", "lower": [0, 0], "upper": [10, 10]}})";
  const std::string sched = R"("schedule": {"kind": "constant", "gamma": 0.5})";

  expect_config_error("{" + good_problem + "," + sched + R"(, "mode": "gradient"})",
                      "mode: must be \"GP\" or \"GGP\"");
  expect_config_error("{" + good_problem + "," + sched + R"(, "mode": "GGP",
                      "starts": [[1, 1]], "stop": {"max_iterations": 5}})",
                      "problem.regularizer: required for mode \"GGP\"");
  expect_config_error("{" + good_problem + "," + sched + R"(, "mode": "GP",
                      "starts": [], "stop": {"max_iterations": 5}})",
                      "starts: must not be empty");
  expect_config_error("{" + good_problem + "," + sched + R"(, "mode": "GP",
                      "starts": [[1, 1, 1]], "stop": {"max_iterations": 5}})",
                      "starts[0]: dimension does not match the set");
  expect_config_error("{" + good_problem + "," + sched + R"(, "mode": "GP",
                      "starts": {"random": 0}, "stop": {"max_iterations": 5}})",
                      "starts.random: must be a positive integer");
  expect_config_error("{" + good_problem + "," + sched + R"(, "mode": "GP",
                      "starts": [[1, 1]], "stop": {"max_iterations": 0}})",
                      "stop.max_iterations: must be a positive integer");
  expect_config_error("{" + good_problem + "," + sched + R"(, "mode": "GP",
                      "starts": [[1, 1]], "stop": {"max_iterations": 5},
                      "log_every": -2})",
                      "log_every: must be >= 0");
  expect_config_error("{" + good_problem + "," + sched + R"(, "mode": "GP",
                      "starts": [[1, 1]], "stop": {"max_iterations": 5},
                      "verify": {"f_gap_tol": -1}})",
                      "verify.f_gap_tol: must be positive");
  expect_config_error("{" + good_problem + R"(, "schedule": {"kind": "power_law",
                      "A": -1, "gamma_exp": 0, "B": 1, "alpha_exp": 1}, "mode": "GP",
                      "starts": [[1, 1]], "stop": {"max_iterations": 5}})",
                      "schedule:");
  expect_config_error("{" + good_problem + "," + sched + R"(, "mode": "GP",
                      "starts": [[1, 1]], "stop": {"max_iterations": 5},
                      "seed": -4})",
                      "seed: must be a nonnegative integer");
}

TEST_CASE("config file loading") {
  const std::string path = "gptik_test_config.json";
  {
    std::ofstream out(path);
    out << kSegmentConfig;
  }
  const auto exp = config::load_experiment(path);
  CHECK(exp.starts.size() == 2);
  std::remove(path.c_str());
  CHECK_THROWS_AS(config::load_experiment("no/such/file.json"), ConfigError);
}

TEST_CASE("verification report on a selecting run") {
  const auto exp = parse_experiment_text(kSegmentConfig);
  const auto rep = report::run_verify(exp);

  const auto* c2 = find_row(rep, "classify: c2");
  REQUIRE(c2 != nullptr);
  CHECK(c2->status == "INFO");
  CHECK(c2->detail == "YES");
  CHECK(find_row(rep, "classify: thm2_strong")->detail == "YES");
  CHECK(find_row(rep, "classify: thm2_weak")->detail == "NO");
  CHECK(find_row(rep, "classify: xu_th0")->detail == "NO");

  const auto* oracle = find_row(rep, "oracle");
  REQUIRE(oracle != nullptr);
  CHECK(oracle->status == "INFO");
  CHECK(oracle->detail.find("kkt_enumeration") != std::string::npos);
  CHECK(std::abs(oracle->value) <= 1e-9);

  CHECK(find_row(rep, "run[0] status")->status == "INFO");
  CHECK(find_row(rep, "run[1] status")->status == "INFO");
  CHECK(find_row(rep, "f_gap_final")->status == "PASS");
  CHECK(find_row(rep, "dist_to_set_final")->status == "PASS");
  const auto* target = find_row(rep, "dist_to_target_final");
  REQUIRE(target != nullptr);
  CHECK(target->status == "PASS");
  CHECK(target->threshold == 1e-2);  // default, not overridden
  CHECK(find_row(rep, "inter_start_spread")->status == "PASS");
  CHECK(find_row(rep, "phi_monotonicity")->status == "PASS");
  CHECK(find_row(rep, "fejer_audit")->status == "PASS");
  const auto* tail = find_row(rep, "step_sq_tail_fraction");
  REQUIRE(tail != nullptr);
  CHECK(tail->status == "INFO");
  CHECK(tail->value < 0.05);

  CHECK(rep.all_passed());
  CHECK_FALSE(rep.any_aborted);
}

TEST_CASE("report without selection marks target and spread informational") {
  // Plain projected gradient from two starts: both land on the solution
  // segment but at start-dependent points.
  const auto exp = parse_experiment_text(R"({
    "problem": {
      "objective": {"kind": "least_squares", "M": [[1, 1]], "y": [2]},
      "set": {"kind": "box", "lower": [0, 0], "upper": [10, 10]}
    },
    "schedule": {"kind": "power_law", "A": 0.1, "gamma_exp": 0, "B": 1, "alpha_exp": 1.5},
    "mode": "GP",
    "starts": [[4, 0], [0, 4]],
    "stop": {"max_iterations": 2000}
  })");
  const auto rep = report::run_verify(exp);

  CHECK(find_row(rep, "classify: thm2_weak")->detail == "YES");
  CHECK(find_row(rep, "classify: thm2_strong")->detail == "NO");
  CHECK(find_row(rep, "f_gap_final")->status == "PASS");
  CHECK(find_row(rep, "dist_to_set_final")->status == "PASS");
  const auto* target = find_row(rep, "dist_to_target_final");
  REQUIRE(target != nullptr);
  CHECK(target->status == "N/A");
  const auto* spread = find_row(rep, "inter_start_spread");
  REQUIRE(spread != nullptr);
  CHECK(spread->status == "INFO");
  CHECK(spread->value > 0.5);  // the two limits genuinely differ
  CHECK(rep.all_passed());
}

TEST_CASE("tabulated schedules skip classification") {
  std::string gammas = "0.5";
  std::string alphas = "1.0";
  for (int i = 1; i < 100; ++i) {
    gammas += ",0.5";
    alphas += "," + std::to_string(1.0 / (i + 1));
  }
  const auto exp = parse_experiment_text(R"({
    "problem": {
      "objective": {"kind": "least_squares", "M": [[1, 1]], "y": [2]},
      "set": {"kind": "box", "lower": [0, 0], "upper": [10, 10]},
      "regularizer": {"kind": "half_squared_norm"}
    },
    "schedule": {"kind": "tabulated", "gammas": [)" +
                                          gammas + R"(], "alphas": [)" + alphas + R"(]},
    "mode": "GGP",
    "starts": [[4, 0]],
    "stop": {"max_iterations": 100}
  })");
  const auto rep = report::run_verify(exp);
  for (const char* name : {"classify: c2", "classify: thm2_strong", "classify: thm2_weak",
                           "classify: xu_th0"}) {
    const auto* row = find_row(rep, name);
    REQUIRE(row != nullptr);
    CHECK(row->status == "SKIP");
    CHECK(row->detail.find("undecidable") != std::string::npos);
  }
  // Selection cannot be asserted from a finite table.
  CHECK(find_row(rep, "dist_to_target_final")->status == "N/A");
  CHECK(find_row(rep, "inter_start_spread")->detail == "single start");
}

TEST_CASE("aborted runs are failures") {
  const auto exp = parse_experiment_text(R"({
    "problem": {
      "objective": {"kind": "least_squares", "M": [[1, 1]], "y": [2]},
      "set": {"kind": "whole_space", "dim": 2}
    },
    "schedule": {"kind": "constant", "gamma": 3.0},
    "mode": "GP",
    "starts": [[4, 0]],
    "stop": {"max_iterations": 2000}
  })");
  const auto rep = report::run_verify(exp);
  const auto* run0 = find_row(rep, "run[0] status");
  REQUIRE(run0 != nullptr);
  CHECK(run0->status == "FAIL");
  CHECK(run0->detail.find("aborted") != std::string::npos);
  CHECK(rep.any_aborted);
  CHECK_FALSE(rep.all_passed());
}

TEST_CASE("report rendering") {
  const auto exp = parse_experiment_text(kSegmentConfig);
  const auto rep = report::run_verify(exp);

  const std::string text = report::render_text(rep);
  CHECK(text.find("RESULT: no failing rows") != std::string::npos);
  CHECK(text.find("f_gap_final") != std::string::npos);
  CHECK(text.find("classify: thm2_strong") != std::string::npos);

  const std::string js = report::render_json(rep);
  const auto j = nlohmann::json::parse(js);
  CHECK(j.at("all_passed").get<bool>());
  CHECK_FALSE(j.at("any_aborted").get<bool>());
  REQUIRE(j.at("rows").is_array());
  CHECK(j.at("rows").size() == rep.rows.size());
  // NaN values serialize as null (classification rows carry no numbers).
  bool saw_null_value = false;
  for (const auto& row : j.at("rows"))
    if (row.at("value").is_null()) saw_null_value = true;
  CHECK(saw_null_value);
}
