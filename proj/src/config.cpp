#include "gptik/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gptik::config {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

const json* find(const json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  const auto it = j.find(key);
  return (it == j.end() || it->is_null()) ? nullptr : &*it;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "must be a number");
  return j.get<double>();
}

long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "must be an integer");
  return j.get<long>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "must be a string");
  return j.get<std::string>();
}

Vector as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(path, "must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::vector<double> as_double_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "must be an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(path, "must be an array of numbers");
    v.push_back(j[i].get<double>());
  }
  return v;
}

Matrix as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "must be a nonempty array of number rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(path, "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) fail(path, "entries must be numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

template <typename F>
auto rewrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

objectives::SmoothObjective parse_objective(const json& j, const std::string& path) {
  const std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "quadratic") {
    Matrix A = as_matrix(require(j, "A", path), path + ".A");
    Vector b = as_vector(require(j, "b", path), path + ".b");
    double c = 0.0;
    if (const json* jc = find(j, "c")) c = as_double(*jc, path + ".c");
    return rewrap(path, [&] { return objectives::SmoothObjective::quadratic(A, b, c); });
  }
  if (kind == "least_squares") {
    Matrix M = as_matrix(require(j, "M", path), path + ".M");
    Vector y = as_vector(require(j, "y", path), path + ".y");
    return rewrap(path, [&] { return objectives::SmoothObjective::least_squares(M, y); });
  }
  if (kind == "huberized_norm") {
    const long dim = as_integer(require(j, "dim", path), path + ".dim");
    const double delta = as_double(require(j, "delta", path), path + ".delta");
    if (dim < 1) fail(path + ".dim", "must be a positive integer");
    if (!(delta > 0.0)) fail(path + ".delta", "must be positive");
    return rewrap(path, [&] { return objectives::SmoothObjective::huberized_norm(dim, delta); });
  }
  if (kind == "translated") {
    auto base = parse_objective(require(j, "base", path), path + ".base");
    Vector shift = as_vector(require(j, "shift", path), path + ".shift");
    return rewrap(path,
                  [&] { return objectives::SmoothObjective::translated(std::move(base), shift); });
  }
  fail(path + ".kind",
       "unknown objective kind \"" + kind +
           "\" (expected quadratic, least_squares, huberized_norm, or translated)");
}

geometry::ConvexSet parse_set(const json& j, const std::string& path) {
  const std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "box") {
    Vector lo = as_vector(require(j, "lower", path), path + ".lower");
    Vector hi = as_vector(require(j, "upper", path), path + ".upper");
    return rewrap(path, [&] { return geometry::ConvexSet::box(lo, hi); });
  }
  if (kind == "ball") {
    Vector c = as_vector(require(j, "center", path), path + ".center");
    const double r = as_double(require(j, "radius", path), path + ".radius");
    if (!(r > 0.0)) fail(path + ".radius", "must be positive");
    return rewrap(path, [&] { return geometry::ConvexSet::ball(c, r); });
  }
  if (kind == "simplex") {
    const long dim = as_integer(require(j, "dim", path), path + ".dim");
    const double scale = as_double(require(j, "scale", path), path + ".scale");
    if (dim < 1) fail(path + ".dim", "must be a positive integer");
    if (!(scale > 0.0)) fail(path + ".scale", "must be positive");
    return rewrap(path, [&] { return geometry::ConvexSet::simplex(dim, scale); });
  }
  if (kind == "halfspace" || kind == "affine_hyperplane") {
    Vector n = as_vector(require(j, "normal", path), path + ".normal");
    const double off = as_double(require(j, "offset", path), path + ".offset");
    return rewrap(path, [&] {
      return kind == "halfspace" ? geometry::ConvexSet::halfspace(n, off)
                                 : geometry::ConvexSet::affine_hyperplane(n, off);
    });
  }
  if (kind == "whole_space") {
    const long dim = as_integer(require(j, "dim", path), path + ".dim");
    if (dim < 1) fail(path + ".dim", "must be a positive integer");
    return rewrap(path, [&] { return geometry::ConvexSet::whole_space(dim); });
  }
  fail(path + ".kind",
       "unknown set kind \"" + kind +
           "\" (expected box, ball, simplex, halfspace, affine_hyperplane, or whole_space)");
}

std::optional<objectives::Regularizer> parse_regularizer(const json* j, const std::string& path,
                                                         Eigen::Index dim) {
  if (j == nullptr) return std::nullopt;
  const std::string kind = as_string(require(*j, "kind", path), path + ".kind");
  if (kind == "half_squared_norm")
    return rewrap(path, [&] { return objectives::Regularizer::half_squared_norm(dim); });
  if (kind == "half_squared_distance") {
    Vector c = as_vector(require(*j, "center", path), path + ".center");
    return rewrap(path, [&] { return objectives::Regularizer::half_squared_distance(c); });
  }
  fail(path + ".kind",
       "unknown regularizer kind \"" + kind +
           "\" (expected half_squared_norm or half_squared_distance)");
}

schedules::Schedule parse_schedule(const json& j, const std::string& path) {
  const std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "power_law") {
    const double A = as_double(require(j, "A", path), path + ".A");
    const double g = as_double(require(j, "gamma_exp", path), path + ".gamma_exp");
    const double B = as_double(require(j, "B", path), path + ".B");
    const double a = as_double(require(j, "alpha_exp", path), path + ".alpha_exp");
    return rewrap(path, [&] { return schedules::Schedule::power_law(A, g, B, a); });
  }
  if (kind == "constant") {
    const double gamma = as_double(require(j, "gamma", path), path + ".gamma");
    double B = 1.0;
    double a = 1.0;  // defaults documented in the schema
    if (const json* jb = find(j, "B")) B = as_double(*jb, path + ".B");
    if (const json* ja = find(j, "alpha_exp")) a = as_double(*ja, path + ".alpha_exp");
    return rewrap(path, [&] { return schedules::Schedule::constant(gamma, B, a); });
  }
  if (kind == "tabulated") {
    const auto gs = as_double_list(require(j, "gammas", path), path + ".gammas");
    const auto as = as_double_list(require(j, "alphas", path), path + ".alphas");
    return rewrap(path, [&] { return schedules::Schedule::tabulated(gs, as); });
  }
  fail(path + ".kind",
       "unknown schedule kind \"" + kind + "\" (expected power_law, constant, or tabulated)");
}

Experiment parse_experiment(const json& j) {
  const json& problem = require(j, "problem", "config");
  auto objective = parse_objective(require(problem, "objective", "problem"), "problem.objective");
  auto set = parse_set(require(problem, "set", "problem"), "problem.set");
  if (objective.dim() != set.dim())
    fail("problem", "objective dimension " + std::to_string(objective.dim()) +
                        " does not match set dimension " + std::to_string(set.dim()));
  auto regularizer =
      parse_regularizer(find(problem, "regularizer"), "problem.regularizer", set.dim());
  if (regularizer && regularizer->dim() != set.dim())
    fail("problem.regularizer", "dimension does not match the set");
  auto schedule = parse_schedule(require(j, "schedule", "config"), "schedule");

  Experiment exp{std::move(objective), std::move(set), std::move(regularizer),
                 std::move(schedule), solver::Mode::gp, {}, {}, 0, 0, ".", {}, std::nullopt};

  const std::string mode = as_string(require(j, "mode", "config"), "mode");
  if (mode == "GP") {
    exp.mode = solver::Mode::gp;
  } else if (mode == "GGP") {
    exp.mode = solver::Mode::ggp;
  } else {
    fail("mode", "must be \"GP\" or \"GGP\"");
  }
  if (exp.mode == solver::Mode::ggp && !exp.regularizer)
    fail("problem.regularizer", "required for mode \"GGP\"");

  if (const json* js = find(j, "seed")) {
    const long s = as_integer(*js, "seed");
    if (s < 0) fail("seed", "must be a nonnegative integer");
    exp.seed = static_cast<std::uint64_t>(s);
  }

  const json& starts = require(j, "starts", "config");
  if (starts.is_array()) {
    for (std::size_t i = 0; i < starts.size(); ++i)
      exp.starts.push_back(as_vector(starts[i], "starts[" + std::to_string(i) + "]"));
  } else if (starts.is_object() && starts.contains("random")) {
    const long n = as_integer(starts["random"], "starts.random");
    if (n < 1) fail("starts.random", "must be a positive integer");
    exp.random_starts = static_cast<int>(n);
    exp.starts = exp.set.sample(exp.seed, static_cast<int>(n));
  } else {
    fail("starts", "must be an array of vectors or {\"random\": N}");
  }
  if (exp.starts.empty()) fail("starts", "must not be empty");
  for (std::size_t i = 0; i < exp.starts.size(); ++i)
    if (exp.starts[i].size() != exp.set.dim())
      fail("starts[" + std::to_string(i) + "]", "dimension does not match the set");

  const json& stop = require(j, "stop", "config");
  exp.stop.max_iterations = as_integer(require(stop, "max_iterations", "stop"),
                                       "stop.max_iterations");
  if (exp.stop.max_iterations < 1) fail("stop.max_iterations", "must be a positive integer");
  if (const json* jt = find(stop, "step_tolerance")) {
    exp.stop.step_tolerance = as_double(*jt, "stop.step_tolerance");
    if (!(exp.stop.step_tolerance >= 0.0)) fail("stop.step_tolerance", "must be >= 0");
  }
  if (const json* jw = find(stop, "wall_clock_seconds")) {
    const double w = as_double(*jw, "stop.wall_clock_seconds");
    if (!(w > 0.0)) fail("stop.wall_clock_seconds", "must be positive");
    exp.stop.wall_clock_seconds = w;
  }

  if (const json* jl = find(j, "log_every")) {
    exp.log_every = as_integer(*jl, "log_every");
    if (exp.log_every < 0) fail("log_every", "must be >= 0 (0 = geometric decimation)");
  }
  if (const json* jo = find(j, "output_dir")) exp.output_dir = as_string(*jo, "output_dir");

  if (const json* jv = find(j, "verify")) {
    if (!jv->is_object()) fail("verify", "must be an object");
    auto grab = [&](const char* key) -> std::optional<double> {
      if (const json* jt = find(*jv, key)) {
        const double v = as_double(*jt, std::string("verify.") + key);
        if (!(v > 0.0)) fail(std::string("verify.") + key, "must be positive");
        return v;
      }
      return std::nullopt;
    };
    exp.verify.f_gap = grab("f_gap_tol");
    exp.verify.dist_to_target = grab("dist_to_target_tol");
    exp.verify.dist_to_set = grab("dist_to_set_tol");
    exp.verify.spread = grab("spread_tol");
  }
  return exp;
}

}  // namespace

solver::ProblemInstance Experiment::instance(std::size_t start_index) const {
  if (start_index >= starts.size()) throw std::invalid_argument("start index out of range");
  return solver::ProblemInstance::make(objective, set, regularizer, schedule,
                                       starts[start_index]);
}

Experiment parse_experiment_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_experiment(j);
}

Experiment load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_text(buf.str());
}

}  // namespace gptik::config
