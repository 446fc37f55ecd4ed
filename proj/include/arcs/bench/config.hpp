#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcs/arcs_solver.hpp"
#include "arcs/baselines.hpp"
#include "arcs/problems.hpp"
#include "arcs/stochastic.hpp"

namespace arcs::bench {

/// A configuration error, reported as `source:line:column: message`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ProblemSpec {
  std::string name;  ///< quadratic | rosenbrock | logistic | iris_mlp | autoencoder | mlp
  std::size_t dim = 0;         ///< 0: problem default
  double condition = 100.0;    ///< quadratic
  bool diagonal = false;       ///< quadratic
  std::string dataset;         ///< logistic and mlp: blobs | iris | digits
  std::filesystem::path data_dir;
  std::string iris_file = "iris.csv";
  std::string images_file = "digits-images-idx3-ubyte";
  std::string labels_file = "digits-labels-idx1-ubyte";
  std::size_t limit = 1000;
  std::size_t image_side = 8;
  std::size_t downsample = 1;
  std::vector<std::size_t> hidden;
  Activation activation = Activation::relu;
  double l2 = 1e-4;
  bool standardize = true;
  BlobSpec blobs{};
};

struct OptimizerSpec {
  std::string name;  ///< arcs_lsr1 | sgd_momentum | adagrad | rmsprop | adam | lbfgs
  ArcsConfig arcs{};
  BaselineConfig baseline{};
  bool is_arcs() const { return name == "arcs_lsr1"; }
};

struct RunConfig {
  std::filesystem::path source;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  ProblemSpec problem;
  std::vector<OptimizerSpec> optimizers;
  std::optional<BatchSchedule> schedule;  ///< present: stochastic mode
  std::size_t epochs = 10;
  std::size_t iterations = 1000;          ///< deterministic mode cap
  SweepGrid sweep{};
  bool wall_clock = false;
};

/// Parses the YAML text of a run configuration. Either a single
/// `optimizer:` block or an `optimizers:` list may be given.
RunConfig parse_config(const std::string& text, const std::string& source_name);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the objective and starting point. Relative data paths resolve
/// against $ARCS_DATA_DIR, then the config's `data_dir`, then `data/`.
Problem build_problem(const ProblemSpec& spec, std::uint64_t seed);

}  // namespace arcs::bench
