#pragma once

#include <limits>
#include <string>
#include <vector>

#include "gptik/config.hpp"

namespace gptik::report {

/// One auditable check: the status is derived only from the numbers carried
/// by the row itself.
///   PASS/FAIL  checked against threshold
///   SKIP       check not runnable (e.g. no exact oracle, tabulated schedule)
///   N/A        check not applicable to this regime
///   INFO       measured value reported without a verdict
struct Row {
  std::string name;
  std::string status;
  double value = std::numeric_limits<double>::quiet_NaN();
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct ReproductionReport {
  std::vector<Row> rows;
  bool any_aborted = false;  // a solver run ended with a non-finite abort

  bool all_passed() const {
    for (const auto& r : rows)
      if (r.status == "FAIL") return false;
    return true;
  }
};

/// Runs the full verification pipeline on an experiment: schedule
/// classification, solver runs from every start, oracle comparisons
/// (optimal-value gap, distance to the solution set, distance to the
/// selected point, inter-start spread), and the per-iteration inequality
/// audits on a densely logged prefix.
ReproductionReport run_verify(const config::Experiment& exp);

/// Human-readable table.
std::string render_text(const ReproductionReport& rep);

/// Machine-readable JSON ({"rows": [...], "all_passed": bool}).
std::string render_json(const ReproductionReport& rep);

}  // namespace gptik::report
