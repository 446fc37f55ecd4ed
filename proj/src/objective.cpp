#include "arcs/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arcs {

double Objective::value_and_gradient(const Vector& theta, Vector& grad) const {
  grad = gradient(theta);
  return value(theta);
}

double Objective::value_batch(const Vector&, std::span<const std::size_t>) const {
  throw std::logic_error("objective has no batch interface");
}

double Objective::value_and_gradient_batch(const Vector&, std::span<const std::size_t>,
                                           Vector&) const {
  throw std::logic_error("objective has no batch interface");
}

BatchView::BatchView(const Objective& parent, std::vector<std::size_t> indices,
                     std::uint64_t stamp)
    : parent_(parent), indices_(std::move(indices)), stamp_(stamp) {
  if (indices_.empty()) throw std::invalid_argument("BatchView: empty batch");
  const std::size_t n = parent.dataset_size();
  for (std::size_t i : indices_)
    if (i >= n) throw std::out_of_range("BatchView: sample index out of range");
}

double BatchView::value(const Vector& theta) const { return parent_.value_batch(theta, indices_); }

Vector BatchView::gradient(const Vector& theta) const {
  Vector g;
  parent_.value_and_gradient_batch(theta, indices_, g);
  return g;
}

double BatchView::value_and_gradient(const Vector& theta, Vector& grad) const {
  return parent_.value_and_gradient_batch(theta, indices_, grad);
}

double gradient_check_error(const Objective& obj, const Vector& theta) {
  const Vector g = obj.gradient(theta);
  Vector fd(theta.size());
  Vector x = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(theta[i]));
    x[i] = theta[i] + h;
    const double fp = obj.value(x);
    x[i] = theta[i] - h;
    const double fm = obj.value(x);
    x[i] = theta[i];
    fd[i] = (fp - fm) / (2.0 * h);
  }
  Vector diff = g;
  axpy(-1.0, fd, diff);
  return norm2(diff) / std::max(norm2(fd), 1e-8);
}

}  // namespace arcs
