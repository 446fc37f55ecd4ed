#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace arcs {

using Vector = std::vector<double>;

/// Row-major dense matrix. Sized for the k x k and n x k blocks of the
/// limited-memory representation; not a general-purpose linear algebra type.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  /// Builds an n x k matrix whose j-th column is columns[j].
  static Matrix from_columns(std::span<const Vector> columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;

  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  double frobenius_norm() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// A * x.
Vector multiply(const Matrix& a, std::span<const double> x);
/// A^T * x.
Vector multiply_transpose(const Matrix& a, std::span<const double> x);
/// A^T * B without forming A^T.
Matrix transpose_multiply(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
bool all_finite(std::span<const double> a);

struct ThinQr {
  Matrix q;  ///< n x k, orthonormal columns
  Matrix r;  ///< k x k, upper triangular, nonnegative diagonal
};

/// Householder thin QR of an n x k matrix (n >= k). Rank-deficient input is
/// fine: Q stays orthonormal and R picks up zero diagonal entries.
ThinQr qr_thin(const Matrix& a);

struct SymEig {
  Matrix vectors;  ///< orthogonal, column j pairs with values[j]
  Vector values;   ///< ascending
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. The input is
/// symmetrized as (A + A^T)/2 first.
SymEig sym_eig(const Matrix& a);

struct GenSymEig {
  Vector values;   ///< ascending
  Matrix vectors;  ///< B-orthonormal, column j pairs with values[j]
};

/// Solves A u = lambda B u for symmetric A and symmetric positive definite B
/// by whitening with the spectral factorization of B. Throws
/// IllConditionedMetric when the smallest eigenvalue of B is not above
/// 1e-12 * trace(B) / k.
GenSymEig gen_sym_eig(const Matrix& a, const Matrix& b);

struct SmallSolve {
  Matrix x;
  double condition = 0.0;  ///< 1-norm condition estimate of A
};

/// Solves A X = B with partially pivoted LU. Throws SingularSystem when a
/// pivot falls below 1e-14 * ||A||_F.
SmallSolve solve_small(const Matrix& a, const Matrix& b);

}  // namespace arcs
