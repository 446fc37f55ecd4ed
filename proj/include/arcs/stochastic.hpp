#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arcs/arcs_solver.hpp"
#include "arcs/baselines.hpp"
#include "arcs/objective.hpp"

namespace arcs {

struct BatchSchedule {
  std::size_t initial_batch = 128;
  std::size_t max_batch = 0;       ///< 0 means the dataset size
  double growth_factor = 2.0;
  std::size_t full_eval_period = 10;  ///< J, counted in optimizer iterations
  double stall_tolerance = 1e-4;      ///< tau
  std::size_t max_iters_per_batch = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Anything the mini-batch loop can drive. Each batch is presented as its
/// own objective; implementations re-evaluate at the current point when a
/// new batch begins so that curvature pairs never straddle two batches.
class StochasticOptimizer {
 public:
  virtual ~StochasticOptimizer() = default;
  virtual std::string name() const = 0;
  virtual void begin_batch(const Objective& batch, const Vector& theta) = 0;
  virtual IterRecord iterate(const Objective& batch) = 0;
  virtual const Vector& theta() const = 0;
  /// True once the method's own stopping test has fired on the last batch.
  virtual bool converged() const { return false; }
};

std::unique_ptr<StochasticOptimizer> make_arcs_optimizer(const ArcsConfig& cfg);
std::unique_ptr<StochasticOptimizer> make_baseline_optimizer(const BaselineConfig& cfg);

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t iter = 0;  ///< cumulative optimizer iterations
  double f_train = 0.0;
  std::optional<double> f_test;
  std::optional<double> accuracy;
  double grad_norm = 0.0;
  std::optional<double> mu;
  std::size_t batch_size = 0;
  std::optional<double> rho;
  std::optional<double> step_norm;
  double wall_seconds = 0.0;  ///< cumulative optimizer time, reporting excluded
};

struct StochasticResult {
  Vector theta;
  std::vector<EpochRecord> epochs;   ///< epoch 0 is the starting point
  std::vector<std::size_t> batch_sizes;  ///< batch size of every optimizer iteration
  std::vector<double> full_evaluations;  ///< the J-periodic losses the growth test used
  std::size_t growth_events = 0;
  std::vector<std::string> diagnostics;
};

/// Mini-batch training. Each epoch is a seeded permutation of the training
/// set cut into batches of the current size d; the optimizer runs up to
/// max_iters_per_batch iterations per batch. Every J iterations the full
/// training loss is evaluated, and d <- min(ceil(growth d), d_max) whenever
/// it failed to drop by tau since the previous evaluation. Per-epoch
/// reporting metrics are computed outside that decision path.
StochasticResult run_epochs(const Objective& obj, StochasticOptimizer& opt,
                            const BatchSchedule& schedule, std::size_t epochs, const Vector& theta0,
                            const SupervisedObjective* reporter = nullptr);

struct SweepGrid {
  std::vector<std::size_t> memory{5, 10, 15, 20, 50, 100};
  std::vector<std::size_t> max_iters{1, 10, 15, 20};
  std::vector<std::size_t> batch{128, 256, 512, 1024};
};

struct SweepRow {
  std::size_t memory = 0;
  std::size_t max_iters = 0;
  std::size_t batch = 0;
  std::optional<double> early_accuracy;  ///< best accuracy over epochs 1..5
  std::optional<double> final_accuracy;
  double final_train_loss = 0.0;
  double wall_seconds = 0.0;
  StochasticResult run;
};

/// ARCs-LSR1 over the Cartesian product of the grid, every cell with the
/// same schedule seed and starting point.
std::vector<SweepRow> hyperparameter_sweep(const Objective& obj, const Vector& theta0,
                                           const ArcsConfig& base, const BatchSchedule& schedule,
                                           const SweepGrid& grid, std::size_t epochs,
                                           const SupervisedObjective* reporter = nullptr);

}  // namespace arcs
