#pragma once

#include <cstddef>
#include <deque>
#include <string_view>
#include <vector>

#include "arcs/arcs_solver.hpp"
#include "arcs/objective.hpp"

namespace arcs {

enum class BaselineMethod { sgd_momentum, adagrad, rmsprop, adam, lbfgs };

std::string_view to_string(BaselineMethod m);
BaselineMethod baseline_method_from_string(std::string_view name);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::adam;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double eps_perturbation = 1e-6;
  double alpha_rms = 0.99;
  double beta1 = 0.9;
  double beta2 = 0.999;
  std::size_t lbfgs_memory = 10;
  double lbfgs_tol = 1e-9;
  std::size_t max_iter = 1000;

  /// Experiment defaults for each method:
  ///   sgd_momentum  lr 1e-1, momentum 0.9
  ///   adagrad       lr 1e-2, eps 1e-10, accumulator starts at 0
  ///   rmsprop       lr 1e-2, eps 1e-8, alpha 0.99
  ///   adam          lr 1e-3, eps 1e-6, betas (0.9, 0.999)
  ///   lbfgs         lr 1.0, tolerance 1e-9
  static BaselineConfig defaults(BaselineMethod method);

  /// Checks the fields the chosen method consults.
  void validate() const;
};

/// Per-parameter state of the first-order methods.
struct FirstOrderState {
  Vector velocity;     ///< sgd momentum
  Vector accumulator;  ///< adagrad sum of squares / rmsprop running mean
  Vector m1, m2;       ///< adam moments
  std::size_t t = 0;
};

/// One update of sgd_momentum, adagrad, rmsprop or adam:
///   sgd      v <- momentum v - lr g;  theta <- theta + v
///   adagrad  G <- G + g^2;            theta <- theta - lr g / (sqrt(G) + eps)
///   rmsprop  E <- a E + (1-a) g^2;    theta <- theta - lr g / (sqrt(E) + eps)
///   adam     bias-corrected moments;  theta <- theta - lr m^ / (sqrt(v^) + eps)
/// Throws NumericFailure on a non-finite gradient.
void baseline_step(const BaselineConfig& cfg, FirstOrderState& state, const Vector& g,
                   Vector& theta);

/// Limited-memory BFGS: two-loop recursion, backtracking search (halving,
/// initial step = learning_rate) accepting either Armijo with c = 1e-4 or
/// the approximate Wolfe test f(t) <= f(0) + 1e-10 |f(0)|,
/// 0.9 f'(0) <= f'(t) <= (2e-4 - 1) f'(0), which still makes progress once
/// decreases in f fall below rounding. Curvature pairs are kept only when
/// s^T y > 1e-10 ||s|| ||y||.
class Lbfgs {
 public:
  explicit Lbfgs(BaselineConfig cfg);

  /// Sets theta and evaluates f, g on `obj`; keeps the pair history.
  void reset_point(const Objective& obj, const Vector& theta);
  void clear_history() { pairs_.clear(); }

  /// One line-search iteration. `obj` must have the sample stamp f and g were
  /// evaluated on.
  IterRecord step(const Objective& obj);

  /// H g via the two-loop recursion.
  Vector direction(const Vector& g) const;

  const Vector& theta() const { return theta_; }
  double f() const { return f_; }
  const Vector& g() const { return g_; }
  std::size_t history_size() const { return pairs_.size(); }

 private:
  BaselineConfig cfg_;
  std::deque<CurvaturePair> pairs_;
  Vector theta_;
  double f_ = 0.0;
  Vector g_;
  std::uint64_t stamp_ = 0;
  std::size_t k_ = 0;
};

/// Runs L-BFGS until ||g|| <= lbfgs_tol or max_iter iterations.
MinimizeResult lbfgs_minimize(const Objective& obj, const Vector& theta0, const BaselineConfig& cfg);

/// Full-batch first-order run for max_iter iterations.
MinimizeResult first_order_minimize(const Objective& obj, const Vector& theta0,
                                    const BaselineConfig& cfg);

}  // namespace arcs
