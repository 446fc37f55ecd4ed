#include "arcs/stochastic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace arcs {

void BatchSchedule::validate() const {
  if (initial_batch == 0) throw std::invalid_argument("BatchSchedule: initial_batch must be > 0");
  if (max_batch != 0 && max_batch < initial_batch)
    throw std::invalid_argument("BatchSchedule: max_batch must be >= initial_batch");
  if (!(growth_factor > 1.0)) throw std::invalid_argument("BatchSchedule: growth_factor must be > 1");
  if (full_eval_period < 2) throw std::invalid_argument("BatchSchedule: full_eval_period must be > 1");
  if (!(stall_tolerance > 0.0)) throw std::invalid_argument("BatchSchedule: stall_tolerance must be > 0");
  if (max_iters_per_batch == 0)
    throw std::invalid_argument("BatchSchedule: max_iters_per_batch must be >= 1");
}

namespace {

class ArcsOptimizer final : public StochasticOptimizer {
 public:
  explicit ArcsOptimizer(const ArcsConfig& cfg) : solver_(cfg) {}
  std::string name() const override { return "arcs_lsr1"; }
  void begin_batch(const Objective& batch, const Vector& theta) override {
    if (!started_) {
      solver_.start(batch, theta);
      started_ = true;
    } else {
      solver_.reset_point(batch, theta);
    }
  }
  IterRecord iterate(const Objective& batch) override { return solver_.step(batch); }
  const Vector& theta() const override { return solver_.state().theta; }
  bool converged() const override {
    return started_ && (solver_.small_step() || norm2(solver_.state().g) == 0.0);
  }

 private:
  ArcsSolver solver_;
  bool started_ = false;
};

class FirstOrderOptimizer final : public StochasticOptimizer {
 public:
  explicit FirstOrderOptimizer(const BaselineConfig& cfg) : cfg_(cfg) { cfg_.validate(); }
  std::string name() const override { return std::string(to_string(cfg_.method)); }
  void begin_batch(const Objective&, const Vector& theta) override { theta_ = theta; }
  IterRecord iterate(const Objective& batch) override {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    IterRecord rec;
    rec.k = k_++;
    Vector g;
    rec.f_value = batch.value_and_gradient(theta_, g);
    rec.grad_norm = norm2(g);
    Vector before = theta_;
    baseline_step(cfg_, state_, g, theta_);
    axpy(-1.0, theta_, before);
    rec.step_norm = norm2(before);
    rec.rho = std::nan("");
    rec.mu = std::nan("");
    rec.accepted = true;
    rec.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
    return rec;
  }
  const Vector& theta() const override { return theta_; }

 private:
  BaselineConfig cfg_;
  FirstOrderState state_;
  Vector theta_;
  std::size_t k_ = 0;
};

class LbfgsOptimizer final : public StochasticOptimizer {
 public:
  explicit LbfgsOptimizer(const BaselineConfig& cfg) : solver_(cfg), tol_(cfg.lbfgs_tol) {}
  std::string name() const override { return "lbfgs"; }
  void begin_batch(const Objective& batch, const Vector& theta) override {
    solver_.reset_point(batch, theta);
  }
  IterRecord iterate(const Objective& batch) override { return solver_.step(batch); }
  const Vector& theta() const override { return solver_.theta(); }
  bool converged() const override { return norm2(solver_.g()) <= tol_; }

 private:
  Lbfgs solver_;
  double tol_;
};

std::optional<double> finite_or_empty(double x) {
  if (std::isfinite(x)) return x;
  return std::nullopt;
}

}  // namespace

std::unique_ptr<StochasticOptimizer> make_arcs_optimizer(const ArcsConfig& cfg) {
  return std::make_unique<ArcsOptimizer>(cfg);
}

std::unique_ptr<StochasticOptimizer> make_baseline_optimizer(const BaselineConfig& cfg) {
  if (cfg.method == BaselineMethod::lbfgs) return std::make_unique<LbfgsOptimizer>(cfg);
  return std::make_unique<FirstOrderOptimizer>(cfg);
}

StochasticResult run_epochs(const Objective& obj, StochasticOptimizer& opt,
                            const BatchSchedule& schedule, std::size_t epochs, const Vector& theta0,
                            const SupervisedObjective* reporter) {
  using clock = std::chrono::steady_clock;
  schedule.validate();
  const std::size_t n = obj.dataset_size();
  if (n == 0) throw std::invalid_argument("run_epochs: objective has no batch interface");
  if (theta0.size() != obj.dim()) throw std::invalid_argument("run_epochs: dimension mismatch");

  StochasticResult result;
  std::size_t d_max = schedule.max_batch == 0 ? n : schedule.max_batch;
  if (d_max > n) {
    result.diagnostics.push_back("max_batch " + std::to_string(d_max) + " clamped to dataset size " +
                                 std::to_string(n));
    d_max = n;
  }
  std::size_t d = schedule.initial_batch;
  if (d > n) {
    result.diagnostics.push_back("initial_batch " + std::to_string(d) +
                                 " clamped to dataset size " + std::to_string(n));
    d = n;
  }

  std::mt19937_64 rng(schedule.seed);
  Vector theta = theta0;
  std::size_t iter = 0;
  std::uint64_t stamp = 0;
  double wall = 0.0;
  std::optional<IterRecord> last;

  auto report = [&](std::size_t epoch) {
    EpochRecord e;
    e.epoch = epoch;
    e.iter = iter;
    Vector g;
    e.f_train = obj.value_and_gradient(theta, g);
    e.grad_norm = norm2(g);
    if (reporter) {
      e.f_test = finite_or_empty(reporter->test_value(theta));
      e.accuracy = reporter->test_accuracy(theta);
    }
    e.batch_size = d;
    if (last) {
      e.mu = finite_or_empty(last->mu);
      e.rho = finite_or_empty(last->rho);
      e.step_norm = last->step_norm;
    }
    e.wall_seconds = wall;
    result.epochs.push_back(e);
  };

  report(0);
  double previous_full = obj.value(theta);
  result.full_evaluations.push_back(previous_full);

  std::vector<std::size_t> order(n);
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t pos = 0;
    while (pos < n) {
      const std::size_t take = std::min(d, n - pos);
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                     order.begin() + static_cast<std::ptrdiff_t>(pos + take));
      std::sort(batch.begin(), batch.end());
      pos += take;
      const BatchView view(obj, std::move(batch), ++stamp);

      const auto t0 = clock::now();
      opt.begin_batch(view, theta);
      for (std::size_t it = 0; it < schedule.max_iters_per_batch; ++it) {
        last = opt.iterate(view);
        result.batch_sizes.push_back(d);
        ++iter;
        if (iter % schedule.full_eval_period == 0) {
          const double full = obj.value(opt.theta());
          result.full_evaluations.push_back(full);
          if (full > previous_full - schedule.stall_tolerance && d < d_max) {
            d = std::min(d_max, static_cast<std::size_t>(std::ceil(static_cast<double>(d) *
                                                                   schedule.growth_factor)));
            ++result.growth_events;
          }
          previous_full = full;
        }
      }
      theta = opt.theta();
      wall += std::chrono::duration<double>(clock::now() - t0).count();
    }
    report(epoch);
  }
  result.theta = std::move(theta);
  return result;
}

std::vector<SweepRow> hyperparameter_sweep(const Objective& obj, const Vector& theta0,
                                           const ArcsConfig& base, const BatchSchedule& schedule,
                                           const SweepGrid& grid, std::size_t epochs,
                                           const SupervisedObjective* reporter) {
  if (grid.memory.empty() || grid.max_iters.empty() || grid.batch.empty())
    throw std::invalid_argument("hyperparameter_sweep: empty grid axis");
  std::vector<SweepRow> rows;
  for (std::size_t m : grid.memory)
    for (std::size_t iters : grid.max_iters)
      for (std::size_t b : grid.batch) {
        ArcsConfig cfg = base;
        cfg.memory = m;
        BatchSchedule sched = schedule;
        sched.max_iters_per_batch = iters;
        sched.initial_batch = b;
        if (sched.max_batch != 0 && sched.max_batch < b) sched.max_batch = b;
        auto opt = make_arcs_optimizer(cfg);
        SweepRow row;
        row.memory = m;
        row.max_iters = iters;
        row.batch = b;
        row.run = run_epochs(obj, *opt, sched, epochs, theta0, reporter);
        const auto& ep = row.run.epochs;
        for (std::size_t e = 1; e < ep.size() && e <= 5; ++e)
          if (ep[e].accuracy)
            row.early_accuracy = std::max(row.early_accuracy.value_or(0.0), *ep[e].accuracy);
        row.final_accuracy = ep.back().accuracy;
        row.final_train_loss = ep.back().f_train;
        row.wall_seconds = ep.back().wall_seconds;
        rows.push_back(std::move(row));
      }
  return rows;
}

}  // namespace arcs
