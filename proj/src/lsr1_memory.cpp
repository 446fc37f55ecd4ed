#include "arcs/lsr1_memory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "arcs/errors.hpp"

namespace arcs {

PairBuffer::PairBuffer(std::size_t capacity, double accept_eps)
    : capacity_(capacity), accept_eps_(accept_eps) {
  if (capacity == 0) throw std::invalid_argument("PairBuffer: capacity must be positive");
  if (!(accept_eps > 0.0)) throw std::invalid_argument("PairBuffer: accept_eps must be positive");
}

bool PairBuffer::accepts(const Vector& s, const Vector& y, const Vector& bs) const {
  if (s.size() != y.size() || s.size() != bs.size())
    throw std::invalid_argument("PairBuffer: pair length mismatch");
  if (!all_finite(s) || !all_finite(y) || !all_finite(bs))
    throw std::invalid_argument("PairBuffer: non-finite pair");
  if (!empty() && s.size() != dim()) throw std::invalid_argument("PairBuffer: dimension changed");
  Vector r = y;
  axpy(-1.0, bs, r);
  const double lhs = std::abs(dot(s, r));
  const double rhs = accept_eps_ * norm2(s) * norm2(r);
  return lhs > rhs;
}

bool PairBuffer::try_add_pair(const Vector& s, const Vector& y, const LinearMap& current_b) {
  return try_add_pair_with_product(s, y, current_b(s));
}

bool PairBuffer::try_add_pair_with_product(const Vector& s, const Vector& y, const Vector& bs) {
  if (!accepts(s, y, bs)) return false;
  const std::size_t limit = std::min(capacity_, s.size());
  while (pairs_.size() >= limit) pairs_.pop_front();
  pairs_.push_back({s, y});
  return true;
}

void PairBuffer::drop_oldest() {
  if (!pairs_.empty()) pairs_.pop_front();
}

Matrix PairBuffer::s_matrix() const {
  std::vector<Vector> cols;
  cols.reserve(pairs_.size());
  for (const auto& p : pairs_) cols.push_back(p.s);
  return Matrix::from_columns(cols);
}

Matrix PairBuffer::y_matrix() const {
  std::vector<Vector> cols;
  cols.reserve(pairs_.size());
  for (const auto& p : pairs_) cols.push_back(p.y);
  return Matrix::from_columns(cols);
}

SpectralShift spectral_shift(const PairBuffer& buf, DeltaBounds bounds, double previous,
                             double scale) {
  if (buf.empty()) throw std::invalid_argument("spectral_shift: empty history");
  if (!(bounds.min > 0.0) || !(bounds.max >= bounds.min))
    throw std::invalid_argument("spectral_shift: invalid bounds");
  const Matrix s = buf.s_matrix();
  const Matrix y = buf.y_matrix();
  try {
    const GenSymEig eig = gen_sym_eig(transpose_multiply(s, y), transpose_multiply(s, s));
    const double raw = eig.values.front();
    return {std::clamp(scale * raw, bounds.min, bounds.max), raw, false};
  } catch (const IllConditionedMetric&) {
    const bool usable = std::isfinite(previous) && previous >= bounds.min && previous <= bounds.max;
    return {usable ? previous : bounds.min, std::numeric_limits<double>::quiet_NaN(), true};
  }
}

CompactSr1 build_compact(const PairBuffer& buf, double delta, double max_condition) {
  if (buf.empty()) throw std::invalid_argument("build_compact: empty history");
  const Matrix s = buf.s_matrix();
  const Matrix y = buf.y_matrix();
  const std::size_t k = buf.size();

  CompactSr1 c;
  c.delta = delta;
  c.psi = y - delta * s;

  const Matrix sty = transpose_multiply(s, y);
  const Matrix sts = transpose_multiply(s, s);
  c.mmat = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      // D + L + L^T takes the lower triangle of S^T Y and mirrors it.
      const double lower = i >= j ? sty(i, j) : sty(j, i);
      c.mmat(i, j) = lower - delta * sts(i, j);
    }

  try {
    c.condition = solve_small(c.mmat, Matrix::identity(k)).condition;
  } catch (const SingularSystem&) {
    throw SingularMemory("build_compact: middle matrix is singular");
  }
  if (!(c.condition <= max_condition))
    throw SingularMemory("build_compact: middle matrix condition estimate above limit");
  return c;
}

Vector apply_b(const CompactSr1& c, const Vector& v) {
  if (v.size() != c.dim()) throw std::invalid_argument("apply_b: length mismatch");
  const Vector proj = multiply_transpose(c.psi, v);
  const Matrix coef = solve_small(c.mmat, Matrix::from_columns(std::span(&proj, 1))).x;
  Vector out = v;
  for (double& x : out) x *= c.delta;
  axpy(1.0, multiply(c.psi, coef.column(0)), out);
  return out;
}

LsrEigFactors partial_eig(const CompactSr1& c) {
  const ThinQr qr = qr_thin(c.psi);
  // R Mmat^{-1} R^T
  const Matrix inner = qr.r * solve_small(c.mmat, qr.r.transpose()).x;
  SymEig eig = sym_eig(inner);
  return {c.delta, qr.q * eig.vectors, std::move(eig.values)};
}

Matrix dense_b(const CompactSr1& c) {
  const std::size_t n = c.dim();
  if (n > 64) throw std::invalid_argument("dense_b: refusing to expand n > 64");
  const Matrix inv_psi_t = solve_small(c.mmat, c.psi.transpose()).x;
  Matrix b = c.psi * inv_psi_t;
  for (std::size_t i = 0; i < n; ++i) b(i, i) += c.delta;
  return b;
}

Vector Sr1Model::apply(const Vector& v) const {
  if (compact) return apply_b(*compact, v);
  Vector out = v;
  for (double& x : out) x *= delta;
  return out;
}

Sr1Model build_model(PairBuffer& buf, const Sr1ModelOptions& options, double previous_delta) {
  Sr1Model model;
  while (!buf.empty()) {
    const SpectralShift shift =
        spectral_shift(buf, options.bounds, previous_delta, options.shift_scale);
    try {
      CompactSr1 compact = build_compact(buf, shift.delta, options.max_condition);
      model.eig = partial_eig(compact);
      model.delta = shift.delta;
      model.shift_fallback = shift.fallback;
      model.compact = std::move(compact);
      return model;
    } catch (const SingularMemory&) {
      if (buf.size() == 1) {
        buf.clear();
        model.history_cleared = true;
      } else {
        buf.drop_oldest();
        ++model.dropped_pairs;
      }
    }
  }
  model.delta = options.initial_delta;
  model.compact.reset();
  model.eig = LsrEigFactors{options.initial_delta, Matrix(), Vector()};
  return model;
}

}  // namespace arcs
