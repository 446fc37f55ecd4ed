#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "arcs/dense.hpp"
#include "arcs/lsr1_memory.hpp"

namespace arcs::checks {

using Rng = std::mt19937_64;

inline Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

inline Eigen::VectorXd to_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vector from_eigen(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_count(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Eigen::VectorXd gaussian(Rng& rng, std::size_t n) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = d(rng);
  return v;
}

inline Eigen::MatrixXd gaussian(Rng& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> d;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = d(rng);
  return m;
}

inline Eigen::MatrixXd random_orthogonal(Rng& rng, std::size_t n) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, n, n));
  return qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                        static_cast<Eigen::Index>(n));
}

/// A pair history together with the matrix the plain SR1 recursion
/// B <- B + r r^T / (s^T r), r = y - B s, builds from delta I.
struct RecursiveSr1 {
  PairBuffer buffer{1};
  double delta = 1.0;
  Eigen::MatrixXd b;
};

/// k pairs in dimension n whose SR1 denominators stay well away from zero,
/// accepted one by one against the recursively updated matrix.
inline RecursiveSr1 random_history(Rng& rng, std::size_t n, std::size_t k, double delta) {
  RecursiveSr1 h;
  h.buffer = PairBuffer(k);
  h.delta = delta;
  const auto N = static_cast<Eigen::Index>(n);
  h.b = delta * Eigen::MatrixXd::Identity(N, N);
  Eigen::MatrixXd a = gaussian(rng, n, n);
  a = (0.5 * (a + a.transpose())).eval();
  for (int attempt = 0; h.buffer.size() < k && attempt < 1000; ++attempt) {
    const Eigen::VectorXd s = gaussian(rng, n);
    const Eigen::VectorXd y = a * s + 0.1 * gaussian(rng, n);
    const Eigen::VectorXd r = y - h.b * s;
    const double denom = s.dot(r);
    if (std::abs(denom) < 0.1 * s.norm() * r.norm()) continue;
    const Eigen::MatrixXd current = h.b;
    const bool added = h.buffer.try_add_pair(from_eigen(s), from_eigen(y), [&](const Vector& v) {
      return from_eigen(current * to_eigen(v));
    });
    if (!added) continue;
    h.b += r * r.transpose() / denom;
  }
  return h;
}

}  // namespace arcs::checks
