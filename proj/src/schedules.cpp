#include "gptik/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gptik::schedules {

namespace {

void require_positive_finite(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + ": must be positive and finite");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

constexpr long kXuScanHorizon = 1000000;

}  // namespace

Schedule Schedule::power_law(double A, double gamma_exp, double B, double alpha_exp) {
  require_positive_finite(A, "power_law A");
  if (!(gamma_exp >= 0.0) || !std::isfinite(gamma_exp)) {
    throw std::invalid_argument("power_law gamma_exp: must be nonnegative and finite");
  }
  require_positive_finite(B, "power_law B");
  require_positive_finite(alpha_exp, "power_law alpha_exp");
  Schedule s;
  s.kind_ = (gamma_exp == 0.0) ? Kind::constant : Kind::power_law;
  s.A_ = A;
  s.gamma_exp_ = gamma_exp;
  s.B_ = B;
  s.alpha_exp_ = alpha_exp;
  return s;
}

Schedule Schedule::constant(double gamma, double B, double alpha_exp) {
  return power_law(gamma, 0.0, B, alpha_exp);
}

Schedule Schedule::tabulated(std::vector<double> gammas, std::vector<double> alphas) {
  if (gammas.empty() || gammas.size() != alphas.size()) {
    throw std::invalid_argument("tabulated: gamma/alpha tables must be nonempty and equal length");
  }
  for (double g : gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("tabulated gammas: entries must be positive and finite");
    }
  }
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("tabulated alphas: entries must be nonnegative and finite");
    }
  }
  Schedule s;
  s.kind_ = Kind::tabulated;
  s.gammas_ = std::move(gammas);
  s.alphas_ = std::move(alphas);
  return s;
}

Step Schedule::at(long n) const {
  if (n < 1) throw std::out_of_range("schedule index: must be >= 1");
  if (kind_ == Kind::tabulated) {
    if (n > table_size()) {
      throw std::out_of_range("schedule index: beyond tabulated data (n = " + std::to_string(n) +
                              ", table size = " + std::to_string(table_size()) + ")");
    }
    return Step{gammas_[static_cast<std::size_t>(n - 1)], alphas_[static_cast<std::size_t>(n - 1)]};
  }
  const double nd = static_cast<double>(n);
  return Step{A_ * std::pow(nd, -gamma_exp_), B_ * std::pow(nd, -alpha_exp_)};
}

bool Schedule::is_alpha_decreasing(long horizon) const {
  if (horizon < 1) throw std::invalid_argument("is_alpha_decreasing horizon: must be >= 1");
  if (kind_ != Kind::tabulated) return true;  // alpha_exp > 0 enforced at construction
  const long last = std::min(horizon, table_size());
  for (long n = 1; n < last; ++n) {
    if (alphas_[static_cast<std::size_t>(n)] > alphas_[static_cast<std::size_t>(n - 1)]) {
      return false;
    }
  }
  return true;
}

namespace {

// Scans Xu condition (i), 0 < gamma_n <= alpha_n/(L+alpha_n)^2, over
// n = 1..horizon. Returns the first index from which it holds through the
// horizon (horizon+1 if it fails at the last index).
long xu_i_holds_from(const Schedule& s, double L, long horizon) {
  long first_ok = 1;
  for (long n = 1; n <= horizon; ++n) {
    const Step st = s.at(n);
    const double bound = st.alpha / ((L + st.alpha) * (L + st.alpha));
    if (!(st.gamma <= bound)) first_ok = n + 1;
  }
  return first_ok;
}

void add_clause(ConditionReport& report, const std::string& clause, ClauseCheck::Status status,
                const std::string& witness) {
  report.witnesses.push_back(ClauseCheck{clause, status, witness});
}

ConditionReport classify_power_law(const Schedule& s, double L_f) {
  ConditionReport report;
  report.asymptotics_decidable = true;

  const double A = s.coeff_gamma();
  const double g = s.gamma_exp();
  const double a = s.alpha_exp();
  const double gamma_cap = 2.0 / L_f;  // +inf when L_f == 0

  // limsup gamma_n = A when gamma_exp == 0, else 0.
  const bool limsup_ok = (g == 0.0) && (A < gamma_cap);
  add_clause(report, "0 < limsup gamma_n < 2/L_f",
             limsup_ok ? ClauseCheck::Status::pass : ClauseCheck::Status::fail,
             g == 0.0 ? "limsup gamma_n = " + fmt(A) + " vs 2/L_f = " + fmt(gamma_cap)
                      : "gamma_exp = " + fmt(g) + " > 0 forces limsup gamma_n = 0");

  // liminf coincides with limsup for constant gamma, so C2 == limsup clause.
  report.satisfies_c2 = limsup_ok;
  add_clause(report, "0 < liminf gamma_n <= limsup gamma_n < 2/L_f",
             limsup_ok ? ClauseCheck::Status::pass : ClauseCheck::Status::fail,
             g == 0.0 ? "liminf = limsup = " + fmt(A)
                      : "gamma_exp = " + fmt(g) + " > 0 forces liminf gamma_n = 0");

  // alpha_exp > 0 is enforced at construction: alpha decreases strictly to 0.
  add_clause(report, "alpha_n decreases to 0", ClauseCheck::Status::pass,
             "alpha_exp = " + fmt(a) + " > 0");

  const double s_exp = g + a;
  const bool sum_ga_diverges = s_exp <= 1.0;
  add_clause(report, "sum gamma_n*alpha_n = infinity",
             sum_ga_diverges ? ClauseCheck::Status::pass : ClauseCheck::Status::fail,
             "gamma_exp + alpha_exp = " + fmt(s_exp) + (sum_ga_diverges ? " <= 1" : " > 1"));

  const bool sum_g_diverges = g <= 1.0;
  add_clause(report, "sum gamma_n = infinity",
             sum_g_diverges ? ClauseCheck::Status::pass : ClauseCheck::Status::fail,
             "gamma_exp = " + fmt(g) + (sum_g_diverges ? " <= 1" : " > 1"));

  report.satisfies_thm2_strong = limsup_ok && sum_ga_diverges;
  report.satisfies_thm2_weak = limsup_ok && sum_g_diverges && !sum_ga_diverges;

  // Xu conditions (i)-(iv) in the power-law exponent regime:
  //   (i)  gamma_n <= alpha_n/(L+alpha_n)^2 eventually  <=>  alpha_exp < gamma_exp
  //   (ii) alpha_n -> 0                                 <=>  alpha_exp > 0 (always here)
  //   (iii) sum alpha_n*gamma_n = infinity              <=>  gamma_exp + alpha_exp <= 1
  //   (iv) ratio condition                              <=>  2*alpha_exp + gamma_exp < 1
  const bool xu_i_regime = a < g;
  const bool xu_iv = 2.0 * a + g < 1.0;
  report.satisfies_xu_th0 = xu_i_regime && sum_ga_diverges && xu_iv;

  if (xu_i_regime) {
    const long from = xu_i_holds_from(s, L_f, kXuScanHorizon);
    std::string w = "alpha_exp = " + fmt(a) + " < gamma_exp = " + fmt(g) +
                    " (bound decays slower than gamma_n); ";
    if (from == 1) {
      w += "holds for all n <= 10^6";
    } else if (from <= kXuScanHorizon) {
      w += "fails for n < " + std::to_string(from) + ", holds from there through 10^6";
    } else {
      w += "still violated at n = 10^6 (constants dominate over the scanned range)";
    }
    add_clause(report, "Xu (i): gamma_n <= alpha_n/(L_f+alpha_n)^2",
               ClauseCheck::Status::pass, w);
  } else if (g == 0.0) {
    add_clause(report, "Xu (i): gamma_n <= alpha_n/(L_f+alpha_n)^2", ClauseCheck::Status::fail,
               "gamma_n is constant while alpha_n/(L_f+alpha_n)^2 -> 0: fails for all large n");
  } else {
    add_clause(report, "Xu (i): gamma_n <= alpha_n/(L_f+alpha_n)^2", ClauseCheck::Status::fail,
               g == a ? "gamma_exp == alpha_exp = " + fmt(a) +
                            ": boundary case outside the exponent regime"
                      : "gamma_exp = " + fmt(g) + " < alpha_exp = " + fmt(a) +
                            ": gamma_n decays slower than the bound");
  }
  add_clause(report, "Xu (ii): alpha_n -> 0", ClauseCheck::Status::pass,
             "alpha_exp = " + fmt(a) + " > 0");
  add_clause(report, "Xu (iii): sum alpha_n*gamma_n = infinity",
             sum_ga_diverges ? ClauseCheck::Status::pass : ClauseCheck::Status::fail,
             "gamma_exp + alpha_exp = " + fmt(s_exp));
  add_clause(report, "Xu (iv): step-variation ratio -> 0",
             xu_iv ? ClauseCheck::Status::pass : ClauseCheck::Status::fail,
             "2*alpha_exp + gamma_exp = " + fmt(2.0 * a + g) + (xu_iv ? " < 1" : " >= 1"));

  return report;
}

ConditionReport classify_tabulated(const Schedule& s) {
  ConditionReport report;
  report.asymptotics_decidable = false;

  const long size = s.table_size();
  const bool alpha_dec = s.is_alpha_decreasing(size);
  const double alpha_first = s.at(1).alpha;
  const double alpha_last = s.at(size).alpha;

  double partial_sum_ga = 0.0;
  for (long n = 1; n <= size; ++n) {
    const Step st = s.at(n);
    partial_sum_ga += st.gamma * st.alpha;
  }

  add_clause(report, "alpha_n nonincreasing over tabulated data",
             alpha_dec ? ClauseCheck::Status::pass : ClauseCheck::Status::fail,
             "checked " + std::to_string(size) + " entries");
  if (alpha_dec && alpha_last < alpha_first) {
    add_clause(report, "alpha_n -> 0", ClauseCheck::Status::undecidable,
               "alpha decreases from " + fmt(alpha_first) + " to " + fmt(alpha_last) +
                   " over " + std::to_string(size) +
                   " entries; the limit is undecidable-finite-data");
  } else {
    add_clause(report, "alpha_n -> 0", ClauseCheck::Status::undecidable,
               "alpha does not decrease toward zero over the tabulated range (final alpha = " +
                   fmt(alpha_last) + "); undecidable-finite-data");
  }
  add_clause(report, "sum gamma_n*alpha_n = infinity", ClauseCheck::Status::undecidable,
             "partial sum over " + std::to_string(size) + " entries = " + fmt(partial_sum_ga) +
                 "; divergence is undecidable-finite-data");
  add_clause(report, "0 < limsup gamma_n < 2/L_f", ClauseCheck::Status::undecidable,
             "undecidable-finite-data");
  add_clause(report, "Xu (i)-(iv)", ClauseCheck::Status::undecidable, "undecidable-finite-data");
  return report;
}

}  // namespace

ConditionReport classify(const Schedule& s, double L_f) {
  if (!(L_f >= 0.0) || !std::isfinite(L_f)) {
    throw std::invalid_argument("classify L_f: must be nonnegative and finite");
  }
  if (s.kind() == Schedule::Kind::tabulated) return classify_tabulated(s);
  return classify_power_law(s, L_f);
}

double nu_margin(const Schedule& s, double L_f, double L_phi, long horizon) {
  if (!(L_f >= 0.0) || !std::isfinite(L_f)) {
    throw std::invalid_argument("nu_margin L_f: must be nonnegative and finite");
  }
  if (!(L_phi >= 0.0) || !std::isfinite(L_phi)) {
    throw std::invalid_argument("nu_margin L_phi: must be nonnegative and finite");
  }
  if (horizon < 1) throw std::invalid_argument("nu_margin horizon: must be >= 1");
  long last = horizon;
  if (s.kind() == Schedule::Kind::tabulated) last = std::min(last, s.table_size());
  double margin = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= last; ++n) {
    const Step st = s.at(n);
    const double L_n = L_f + st.alpha * L_phi;
    margin = std::min(margin, 1.0 / st.gamma - 0.5 * L_n);
  }
  return margin;
}

}  // namespace gptik::schedules
