#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "checks_internal.hpp"

#ifndef ARCS_DEFAULT_DATA_DIR
#define ARCS_DEFAULT_DATA_DIR "data"
#endif

namespace arcs::checks {

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all{
      {1, "compact_representation", Level::fast, 10, compact_representation},
      {2, "eigendecomposition_fidelity", Level::fast, 10, eigendecomposition_fidelity},
      {3, "subproblem_optimality", Level::fast, 30, subproblem_optimality},
      {4, "holder_sandwich", Level::fast, 10, holder_sandwich},
      {5, "sr1_curvature_recovery", Level::fast, 5, sr1_curvature_recovery},
      {6, "lemma1_bound", Level::fast, 60, lemma1_bound},
      {7, "deterministic_convergence", Level::fast, 30, deterministic_convergence},
      {8, "iris_experiment", Level::full, 300, iris_experiment},
      {9, "autoencoder_experiment", Level::full, 900, autoencoder_experiment},
      {10, "batch_growth", Level::fast, 5, batch_growth},
      {11, "gradient_conformance", Level::full, 60, gradient_conformance},
      {12, "complexity_scaling", Level::full, 120, complexity_scaling},
      {13, "cli_determinism", Level::fast, 60, cli_determinism},
  };
  return all;
}

CheckResult run_suite(const Suite& suite, const CheckOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  CheckResult r;
  try {
    r = suite.body(opts);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.criterion = suite.criterion;
  r.name = suite.name;
  r.budget_seconds = suite.budget_seconds;
  r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
  if (r.seconds >= suite.budget_seconds) {
    r.passed = false;
    std::ostringstream os;
    os << "; over the " << suite.budget_seconds << " s budget";
    r.detail += os.str();
  }
  return r;
}

std::string format_result(const CheckResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << " [" << std::setw(2) << r.criterion << "] " << r.name
     << " (" << std::fixed << std::setprecision(2) << r.seconds << " s): " << r.detail;
  return os.str();
}

std::vector<CheckResult> run_level(Level level, const CheckOptions& opts, std::ostream& out) {
  std::vector<CheckResult> results;
  for (const Suite& s : suites()) {
    if (level == Level::fast && s.level != Level::fast) continue;
    results.push_back(run_suite(s, opts));
    out << format_result(results.back()) << std::endl;
  }
  return results;
}

int cmd_check(Level level, const CheckOptions& opts, std::ostream& out, std::ostream& err) {
  const auto results = run_level(level, opts, out);
  int failed = 0;
  for (const auto& r : results)
    if (!r.passed) {
      err << "check failed: " << r.name << '\n';
      ++failed;
    }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

std::filesystem::path resolve_data_dir(const CheckOptions& opts) {
  if (!opts.data_dir.empty()) return opts.data_dir;
  if (const char* env = std::getenv("ARCS_DATA_DIR"); env && *env) return env;
  return ARCS_DEFAULT_DATA_DIR;
}

}  // namespace arcs::checks
