#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arcs/bench/config.hpp"
#include "arcs/trace.hpp"

namespace arcs::bench {

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
};

struct RunOutcome {
  std::string optimizer;
  std::vector<TraceRow> rows;
  std::filesystem::path trace_path;
  std::optional<double> best_accuracy;
  double final_f_train = 0.0;
  double wall_seconds = 0.0;
  std::string stop;            ///< max_iter, converged, epochs or numeric_failure
  std::string failure;         ///< message when stop is numeric_failure
  std::vector<std::string> diagnostics;
};

/// Runs one optimizer on the configured problem: per-iteration rows in
/// deterministic mode, per-epoch rows when a schedule is configured.
RunOutcome execute(const RunConfig& cfg, const Problem& problem, const OptimizerSpec& opt);

/// The commands return a process exit code and write diagnostics to `err`.
int cmd_run(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
            std::ostream& err);
int cmd_compare(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
                std::ostream& err);
int cmd_sweep(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
              std::ostream& err);

}  // namespace arcs::bench
