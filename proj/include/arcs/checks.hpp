#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace arcs::checks {

/// (gbar, lam, mu) -> argmin of the one-dimensional cubic.
using ScalarMinimizer = std::function<double(double, double, double)>;

struct CheckOptions {
  ScalarMinimizer scalar;              ///< empty: the library closed form
  std::filesystem::path data_dir;      ///< empty: $ARCS_DATA_DIR or the build-time default
  std::filesystem::path scratch_dir;   ///< empty: a fresh directory under the system temp dir
};

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

enum class Level { fast, full };

struct Suite {
  int criterion;
  std::string name;
  Level level;  ///< fast suites also run at full level
  double budget_seconds;
  std::function<CheckResult(const CheckOptions&)> body;
};

/// Every acceptance suite in criterion order.
const std::vector<Suite>& suites();

/// Runs one suite, timing it and failing it when it overruns its budget or throws.
CheckResult run_suite(const Suite& suite, const CheckOptions& opts);

/// Runs the suites of `level`, printing one line per suite as it finishes.
std::vector<CheckResult> run_level(Level level, const CheckOptions& opts, std::ostream& out);

/// Exit code 0 when every suite of `level` passes, 1 otherwise; failing
/// suites are named on `err`.
int cmd_check(Level level, const CheckOptions& opts, std::ostream& out, std::ostream& err);

std::string format_result(const CheckResult& r);

std::filesystem::path resolve_data_dir(const CheckOptions& opts);

}  // namespace arcs::checks
