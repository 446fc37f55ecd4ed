#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arcs/datasets.hpp"
#include "arcs/objective.hpp"

namespace arcs {

/// f(x) = x^T A x / 2 - b^T x + c with A dense symmetric or diagonal.
class Quadratic final : public Objective {
 public:
  static Quadratic dense(Matrix a, Vector b, double c = 0.0);
  static Quadratic diagonal(Vector diag, Vector b, double c = 0.0);
  /// ||x - center||^2 / 2
  static Quadratic centered(const Vector& center);
  /// Q diag(lambda) Q^T with lambda log-spaced in [1, condition] and Q a
  /// seeded random orthogonal matrix; b is seeded Gaussian.
  static Quadratic random_dense(std::size_t n, double condition, std::uint64_t seed);

  std::size_t dim() const override { return b_.size(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double value_and_gradient(const Vector& x, Vector& grad) const override;

  /// A as a dense matrix (n <= 512).
  Matrix hessian() const;
  /// The minimizer A^{-1} b for positive definite A.
  Vector minimizer() const;

 private:
  Quadratic() = default;
  Vector apply(const Vector& x) const;

  std::optional<Matrix> dense_;
  Vector diag_;
  Vector b_;
  double c_ = 0.0;
};

/// Chained Rosenbrock: sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2.
class Rosenbrock final : public Objective {
 public:
  explicit Rosenbrock(std::size_t n);
  std::size_t dim() const override { return n_; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double value_and_gradient(const Vector& x, Vector& grad) const override;

 private:
  std::size_t n_;
};

/// Multinomial logistic regression with biases and an L2 penalty
/// (l2 / 2) ||theta||^2. Parameters are a C x (d + 1) row-major block, the
/// last column being the bias.
class LogisticRegression final : public SupervisedObjective {
 public:
  LogisticRegression(std::shared_ptr<const Dataset> data, double l2);

  std::size_t dim() const override;
  double value(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  double value_and_gradient(const Vector& theta, Vector& grad) const override;
  std::size_t dataset_size() const override { return data_->train.size(); }
  double value_batch(const Vector& theta, std::span<const std::size_t> batch) const override;
  double value_and_gradient_batch(const Vector& theta, std::span<const std::size_t> batch,
                                  Vector& grad) const override;

  double test_value(const Vector& theta) const override;
  std::optional<double> test_accuracy(const Vector& theta) const override;
  double train_accuracy(const Vector& theta) const;

 private:
  double evaluate(const Vector& theta, std::span<const std::size_t> rows, Vector* grad) const;
  std::size_t predict(const Vector& theta, const Vector& x) const;

  std::shared_ptr<const Dataset> data_;
  double l2_;
};

enum class Activation { identity, relu, sigmoid, tanh };
enum class Loss { softmax_cross_entropy, mse };

struct MlpSpec {
  std::vector<std::size_t> widths;  ///< input, hidden..., output
  Activation hidden = Activation::relu;
  /// Output activation for mse; softmax_cross_entropy always uses raw logits.
  Activation output = Activation::sigmoid;
  Loss loss = Loss::softmax_cross_entropy;
  double init_scale = 0.05;  ///< weights and biases start uniform in [-s, s]
  std::uint64_t init_seed = 0;

  /// sum over layers of (w_in + 1) * w_out
  std::size_t parameter_count() const;
};

/// The IRIS classifier: 4 -> 50 -> 50 -> 3, exactly 2953 parameters.
MlpSpec iris_mlp_spec(std::uint64_t init_seed);

/// Fully connected network with hand-written backpropagation. Parameters
/// are laid out layer by layer as W (w_out x w_in, row-major) then b.
class Mlp final : public SupervisedObjective {
 public:
  Mlp(MlpSpec spec, std::shared_ptr<const Dataset> data);

  const MlpSpec& spec() const { return spec_; }
  Vector initial_parameters() const;

  std::size_t dim() const override { return spec_.parameter_count(); }
  double value(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  double value_and_gradient(const Vector& theta, Vector& grad) const override;
  std::size_t dataset_size() const override { return data_->train.size(); }
  double value_batch(const Vector& theta, std::span<const std::size_t> batch) const override;
  double value_and_gradient_batch(const Vector& theta, std::span<const std::size_t> batch,
                                  Vector& grad) const override;

  double test_value(const Vector& theta) const override;
  std::optional<double> test_accuracy(const Vector& theta) const override;

  /// Network output for one input (logits for cross-entropy).
  Vector forward(const Vector& theta, const Vector& x) const;

 private:
  double evaluate(const Vector& theta, std::span<const std::size_t> rows, Vector* grad) const;
  double sample_loss(const Vector& theta, std::size_t row, Vector* grad,
                     std::vector<Vector>& acts) const;

  MlpSpec spec_;
  std::shared_ptr<const Dataset> data_;
};

/// An objective together with its starting point.
struct Problem {
  std::string name;
  std::shared_ptr<const Objective> objective;
  Vector theta0;
  /// Same object as `objective` when it reports test metrics, else null.
  std::shared_ptr<const SupervisedObjective> supervised;
};

}  // namespace arcs
