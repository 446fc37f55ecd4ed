#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "arcs/dense.hpp"

namespace arcs {

/// f(theta) = (1/N) sum_i f_i(theta), optionally with mini-batch access.
///
/// Implementations are immutable after construction; every method is
/// re-entrant.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(const Vector& theta) const = 0;
  virtual Vector gradient(const Vector& theta) const = 0;
  virtual double value_and_gradient(const Vector& theta, Vector& grad) const;

  /// Number of samples behind the batch interface, 0 if there is none.
  virtual std::size_t dataset_size() const { return 0; }
  /// Mean loss over the samples at positions `batch` in [0, dataset_size()).
  virtual double value_batch(const Vector& theta, std::span<const std::size_t> batch) const;
  virtual double value_and_gradient_batch(const Vector& theta, std::span<const std::size_t> batch,
                                          Vector& grad) const;

  /// Identifies the sample set this objective evaluates. Quasi-Newton pairs
  /// must come from two evaluations with the same stamp.
  virtual std::uint64_t sample_stamp() const { return 0; }
};

/// Reporting hooks for objectives backed by a train/test split.
class SupervisedObjective : public Objective {
 public:
  virtual double test_value(const Vector& theta) const = 0;
  /// Test-set classification accuracy in [0, 1]; nullopt for regression losses.
  virtual std::optional<double> test_accuracy(const Vector& theta) const = 0;
};

/// A fixed mini-batch of a parent objective, viewed as a full objective.
class BatchView final : public Objective {
 public:
  BatchView(const Objective& parent, std::vector<std::size_t> indices, std::uint64_t stamp);

  std::size_t dim() const override { return parent_.dim(); }
  double value(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  double value_and_gradient(const Vector& theta, Vector& grad) const override;
  std::uint64_t sample_stamp() const override { return stamp_; }

  std::span<const std::size_t> indices() const { return indices_; }

 private:
  const Objective& parent_;
  std::vector<std::size_t> indices_;
  std::uint64_t stamp_;
};

/// Largest relative error ||g - g_fd|| / max(||g_fd||, 1e-8) between the
/// analytic gradient and central differences with h = 1e-6 max(1, |theta_i|).
double gradient_check_error(const Objective& obj, const Vector& theta);

}  // namespace arcs
