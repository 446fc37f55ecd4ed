#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>

#include "arcs/dense.hpp"

namespace arcs {

/// v -> B v for whatever quasi-Newton matrix is current.
using LinearMap = std::function<Vector(const Vector&)>;

struct CurvaturePair {
  Vector s;  ///< step
  Vector y;  ///< gradient difference
};

/// Bounded FIFO history of accepted (s, y) pairs.
///
/// A pair enters only if |s^T (y - Bs)| > eps ||s|| ||y - Bs|| holds against
/// the matrix B current at insertion time. The effective capacity is
/// min(capacity, n): more pairs than the dimension cannot be independent and
/// would leave Psi with more columns than rows.
class PairBuffer {
 public:
  explicit PairBuffer(std::size_t capacity, double accept_eps = 1e-8);

  std::size_t capacity() const { return capacity_; }
  double accept_eps() const { return accept_eps_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  /// Vector length of stored pairs; 0 while empty.
  std::size_t dim() const { return pairs_.empty() ? 0 : pairs_.front().s.size(); }

  /// The SR1 denominator test, with bs = B s precomputed.
  bool accepts(const Vector& s, const Vector& y, const Vector& bs) const;

  bool try_add_pair(const Vector& s, const Vector& y, const LinearMap& current_b);
  bool try_add_pair_with_product(const Vector& s, const Vector& y, const Vector& bs);

  void drop_oldest();
  void clear() { pairs_.clear(); }

  const std::deque<CurvaturePair>& pairs() const { return pairs_; }
  Matrix s_matrix() const;  ///< n x k
  Matrix y_matrix() const;  ///< n x k

 private:
  std::size_t capacity_;
  double accept_eps_;
  std::deque<CurvaturePair> pairs_;
};

struct DeltaBounds {
  double min = 1e-8;
  double max = 1e8;
};

struct SpectralShift {
  double delta = 0.0;       ///< clamped shift actually used
  double raw = 0.0;         ///< smallest generalized eigenvalue (NaN on fallback)
  bool fallback = false;    ///< S^T S failed the positive-definiteness check
};

/// delta = clamp(scale * min eig(S^T Y, S^T S), bounds). When S^T S is not
/// positive definite, returns `previous` (or bounds.min if previous is not a
/// usable value) with the fallback flag set.
SpectralShift spectral_shift(const PairBuffer& buf, DeltaBounds bounds, double previous = 0.0,
                             double scale = 1.0);

/// B = delta I + Psi Mmat^{-1} Psi^T with Psi = Y - delta S and
/// Mmat = D + L + L^T - delta S^T S.
struct CompactSr1 {
  double delta = 1.0;
  Matrix psi;   ///< n x k
  Matrix mmat;  ///< k x k
  double condition = 1.0;

  std::size_t dim() const { return psi.rows(); }
  std::size_t rank() const { return psi.cols(); }
};

/// Throws SingularMemory when Mmat's condition estimate exceeds max_condition.
CompactSr1 build_compact(const PairBuffer& buf, double delta, double max_condition = 1e12);

/// delta v + Psi (Mmat^{-1} (Psi^T v)), never forming an n x n matrix.
Vector apply_b(const CompactSr1& c, const Vector& v);

/// Spectral form B = delta I + Upar diag(lam_hat) Upar^T.
struct LsrEigFactors {
  double delta = 1.0;
  Matrix upar;    ///< n x k, orthonormal columns
  Vector lam_hat; ///< ascending

  std::size_t rank() const { return lam_hat.size(); }
};

LsrEigFactors partial_eig(const CompactSr1& c);

/// Explicit n x n matrix; test oracle only, refuses n > 64.
Matrix dense_b(const CompactSr1& c);

struct Sr1ModelOptions {
  DeltaBounds bounds{};
  /// Multiplies the smallest generalized eigenvalue before clamping. At
  /// exactly 1 the middle matrix is singular whenever S^T Y is symmetric.
  double shift_scale = 0.5;
  double initial_delta = 1.0;
  double max_condition = 1e12;
};

/// The quasi-Newton matrix for one outer iteration.
struct Sr1Model {
  double delta = 1.0;
  std::optional<CompactSr1> compact;  ///< empty when there is no history
  LsrEigFactors eig;                  ///< rank 0 when there is no history
  bool shift_fallback = false;
  std::size_t dropped_pairs = 0;
  bool history_cleared = false;

  bool has_history() const { return compact.has_value(); }
  Vector apply(const Vector& v) const;
};

/// Rebuilds delta, the compact form and the partial eigendecomposition from
/// the buffer. Drops oldest pairs while the middle matrix is singular and
/// clears the buffer if a single pair is still singular.
Sr1Model build_model(PairBuffer& buf, const Sr1ModelOptions& options, double previous_delta);

}  // namespace arcs
