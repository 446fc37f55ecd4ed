#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "arcs/cubic_subproblem.hpp"
#include "arcs/lsr1_memory.hpp"
#include "arcs/objective.hpp"

namespace arcs {

struct ArcsConfig {
  double mu0 = 1.0;
  double eta1 = 0.1;
  double eta2 = 0.75;
  double gamma1 = 1.0;
  double gamma2 = 2.0;
  double accept_eps = 1e-8;   ///< SR1 pair acceptance
  double term_eps = 1e-9;     ///< small-step termination ||s|| < term_eps ||y - Bs||
  std::size_t memory = 10;
  std::size_t k_max = 1000;
  double grad_tol = 0.0;      ///< stop when ||g|| <= grad_tol
  DeltaBounds delta_bounds{};
  double shift_scale = 0.5;
  double mu_min = 1e-20;      ///< floor on mu so repeated halving cannot underflow
  ParallelCurvature parallel_curvature = ParallelCurvature::shifted;

  /// Throws std::invalid_argument unless 0 < eta1 <= eta2 < 1,
  /// gamma2 >= gamma1, mu0 > 0, eps > 0, memory > 0, k_max > 0.
  void validate() const;
};

enum class StopReason { max_iter, small_step, grad_tol, numeric_failure };
std::string_view to_string(StopReason r);

struct IterRecord {
  std::size_t k = 0;
  double f_value = 0.0;    ///< f at the iterate after this step
  double grad_norm = 0.0;  ///< ||g|| at the iterate after this step
  double rho = 0.0;
  double mu = 0.0;         ///< regularization used for this step
  double step_norm = 0.0;
  bool accepted = false;
  bool pair_accepted = false;
  double wall_time = 0.0;  ///< seconds spent in this iteration
};

struct ArcsState {
  Vector theta;
  double f = 0.0;
  Vector g;
  double mu = 1.0;
  PairBuffer buffer{1};
  std::size_t k = 0;
  double delta = 0.0;          ///< last delta used; 0 before the first model
  Vector last_step;            ///< last accepted step
  Vector last_secant_residual; ///< y - Bs for the last accepted step
  std::uint64_t stamp = 0;     ///< sample set f and g were evaluated on
};

struct MinimizeResult {
  Vector theta;
  std::vector<IterRecord> trace;
  StopReason stop = StopReason::max_iter;
  double f = 0.0;
  double grad_norm = 0.0;
};

/// Called after each model build with the model and the current state.
using ModelObserver = std::function<void(const Sr1Model&, const ArcsState&)>;

/// Adaptive cubic regularization with limited-memory SR1 curvature and a
/// shape-changing norm, so every subproblem has a closed-form solution.
class ArcsSolver {
 public:
  explicit ArcsSolver(ArcsConfig cfg);

  const ArcsConfig& config() const { return cfg_; }
  const ArcsState& state() const { return state_; }

  /// Sets theta, evaluates f and g on `obj`, keeps mu and the pair history.
  void reset_point(const Objective& obj, const Vector& theta);
  /// Fresh start: history cleared, mu = mu0, k = 0.
  void start(const Objective& obj, const Vector& theta);

  /// One outer iteration. `obj` must be the objective f and g were last
  /// evaluated on (same sample stamp). The trial pair is offered to the
  /// history, accepted step or not, when ||s|| >= term_eps ||y - Bs||.
  IterRecord step(const Objective& obj);

  /// True when the small-step test fires for the last accepted step.
  bool small_step() const;

  void set_observer(ModelObserver obs) { observer_ = std::move(obs); }

 private:
  ArcsConfig cfg_;
  ArcsState state_;
  ModelObserver observer_;
};

/// Runs until k_max, the small-step test, or ||g|| <= grad_tol.
MinimizeResult minimize(const Objective& obj, const Vector& theta0, const ArcsConfig& cfg,
                        const ModelObserver& observer = {});

/// Subspace model value versus a direct evaluation of
/// g^T s + s^T B s / 2 + mu/3 ||U^T s||_3^3 with an explicit orthogonal U
/// whose first perpendicular column is the normalized projected gradient.
struct ModelCheckReport {
  double subspace_value = 0.0;
  double direct_value = 0.0;
  double difference = 0.0;
};

ModelCheckReport model_decrease_check(const Vector& g, const Sr1Model& model, double mu,
                                      ParallelCurvature curvature = ParallelCurvature::shifted);

/// Same check for the model the solver would build from `state` next.
ModelCheckReport model_decrease_check(const ArcsState& state, const ArcsConfig& cfg);

}  // namespace arcs
