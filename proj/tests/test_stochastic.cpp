#include <cmath>
#include <memory>
#include <stdexcept>

#include "arcs/problems.hpp"
#include "arcs/stochastic.hpp"
#include "doctest.h"

using namespace arcs;

namespace {

/// Loss that never improves, so every periodic check is a stall.
class Flat final : public Objective {
 public:
  explicit Flat(std::size_t n) : n_(n) {}
  std::size_t dim() const override { return 2; }
  double value(const Vector&) const override { return 1.0; }
  Vector gradient(const Vector&) const override { return {0.0, 0.0}; }
  std::size_t dataset_size() const override { return n_; }
  double value_batch(const Vector&, std::span<const std::size_t>) const override { return 1.0; }
  double value_and_gradient_batch(const Vector&, std::span<const std::size_t>,
                                  Vector& g) const override {
    g.assign(2, 0.0);
    return 1.0;
  }

 private:
  std::size_t n_;
};

std::shared_ptr<LogisticRegression> blob_logistic() {
  BlobSpec spec;
  spec.classes = 3;
  spec.dim = 4;
  spec.per_class = 60;
  spec.seed = 17;
  spec.separation = 2.0;
  auto ds = std::make_shared<Dataset>(synth_blobs(spec));
  return std::make_shared<LogisticRegression>(ds, 1e-3);
}

}  // namespace

TEST_CASE("schedule validation") {
  BatchSchedule s;
  CHECK_NOTHROW(s.validate());
  s.growth_factor = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.initial_batch = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("a flat loss grows the batch to the dataset size") {
  const Flat obj(1000);
  BatchSchedule s;
  s.initial_batch = 8;
  s.full_eval_period = 2;
  auto opt = make_baseline_optimizer(BaselineConfig::defaults(BaselineMethod::sgd_momentum));
  const StochasticResult r = run_epochs(obj, *opt, s, 10, Vector{0.0, 0.0});
  CHECK(r.growth_events == 7);
  CHECK(r.batch_sizes.back() == 1000);
  for (std::size_t i = 1; i < r.batch_sizes.size(); ++i)
    CHECK(r.batch_sizes[i - 1] <= r.batch_sizes[i]);
}

TEST_CASE("oversized batches are clamped with a diagnostic") {
  const Flat obj(50);
  BatchSchedule s;
  s.initial_batch = 128;
  auto opt = make_baseline_optimizer(BaselineConfig::defaults(BaselineMethod::adam));
  const StochasticResult r = run_epochs(obj, *opt, s, 1, Vector{0.0, 0.0});
  REQUIRE_FALSE(r.diagnostics.empty());
  CHECK(r.diagnostics.front().find("clamped") != std::string::npos);
  CHECK(r.batch_sizes.front() == 50);
}

TEST_CASE("a full batch reproduces the deterministic path bit for bit") {
  const auto lr = blob_logistic();
  const Vector theta0(lr->dim(), 0.0);
  ArcsConfig cfg;
  BatchSchedule s;
  s.initial_batch = lr->dataset_size();
  s.full_eval_period = 1000;
  auto opt = make_arcs_optimizer(cfg);
  const StochasticResult r = run_epochs(*lr, *opt, s, 12, theta0);

  ArcsSolver solver(cfg);
  solver.start(*lr, theta0);
  for (int k = 0; k < 12; ++k) solver.step(*lr);
  CHECK(r.theta == solver.state().theta);
}

TEST_CASE("mini-batch logistic regression approaches the full-batch loss") {
  const auto lr = blob_logistic();
  const Vector theta0(lr->dim(), 0.0);
  ArcsConfig cfg;
  cfg.grad_tol = 1e-10;
  cfg.k_max = 500;
  const MinimizeResult full = minimize(*lr, theta0, cfg);

  BatchSchedule s;
  s.initial_batch = 16;
  s.full_eval_period = 10;
  s.stall_tolerance = 1e-4;
  s.max_iters_per_batch = 5;
  auto opt = make_arcs_optimizer(cfg);
  const StochasticResult r = run_epochs(*lr, *opt, s, 40, theta0, lr.get());
  CHECK(r.epochs.back().f_train - full.f < 1e-3);
  for (std::size_t i = 1; i < r.batch_sizes.size(); ++i)
    CHECK(r.batch_sizes[i - 1] <= r.batch_sizes[i]);
  CHECK(r.epochs.size() == 41);
  CHECK(r.epochs.front().epoch == 0);
  CHECK(r.epochs.back().accuracy.has_value());
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const auto lr = blob_logistic();
  const Vector theta0(lr->dim(), 0.0);
  BatchSchedule s;
  s.initial_batch = 32;
  s.seed = 5;
  auto a = make_arcs_optimizer(ArcsConfig{});
  auto b = make_arcs_optimizer(ArcsConfig{});
  const StochasticResult ra = run_epochs(*lr, *a, s, 3, theta0);
  const StochasticResult rb = run_epochs(*lr, *b, s, 3, theta0);
  CHECK(ra.theta == rb.theta);
  CHECK(ra.batch_sizes == rb.batch_sizes);
  CHECK(ra.full_evaluations == rb.full_evaluations);
}

TEST_CASE("a one-cell sweep equals a single run") {
  const auto lr = blob_logistic();
  const Vector theta0(lr->dim(), 0.0);
  BatchSchedule s;
  s.seed = 3;
  SweepGrid grid;
  grid.memory = {7};
  grid.max_iters = {2};
  grid.batch = {24};
  const auto rows = hyperparameter_sweep(*lr, theta0, ArcsConfig{}, s, grid, 3, lr.get());
  REQUIRE(rows.size() == 1);

  ArcsConfig cfg;
  cfg.memory = 7;
  s.max_iters_per_batch = 2;
  s.initial_batch = 24;
  auto opt = make_arcs_optimizer(cfg);
  const StochasticResult single = run_epochs(*lr, *opt, s, 3, theta0, lr.get());
  CHECK(rows[0].run.theta == single.theta);
  CHECK(rows[0].final_train_loss == single.epochs.back().f_train);
}

TEST_CASE("sweep covers the grid and duplicate cells agree") {
  const auto lr = blob_logistic();
  const Vector theta0(lr->dim(), 0.0);
  BatchSchedule s;
  SweepGrid grid;
  grid.memory = {5, 5, 100};
  grid.max_iters = {1};
  grid.batch = {32, 64};
  const auto rows = hyperparameter_sweep(*lr, theta0, ArcsConfig{}, s, grid, 2, lr.get());
  REQUIRE(rows.size() == 6);
  for (const auto& row : rows) {
    CHECK(row.final_accuracy.has_value());
    CHECK(row.early_accuracy.has_value());
    CHECK(std::isfinite(row.final_train_loss));
  }
  CHECK(rows[0].run.theta == rows[2].run.theta);
  CHECK(rows[1].run.theta == rows[3].run.theta);
  CHECK_THROWS_AS(hyperparameter_sweep(*lr, theta0, ArcsConfig{}, s, SweepGrid{{}, {1}, {1}}, 1),
                  std::invalid_argument);
}
