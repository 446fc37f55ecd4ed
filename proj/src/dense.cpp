#include "arcs/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "arcs/errors.hpp"

namespace arcs {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
  if (columns.empty()) return {};
  const std::size_t n = columns.front().size();
  Matrix m(n, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n) throw std::invalid_argument("from_columns: ragged columns");
    for (std::size_t i = 0; i < n; ++i) m(i, j) = columns[j][i];
  }
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const { return norm2(data_); }

bool Matrix::all_finite() const { return arcs::all_finite(data_); }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      auto bp = b.row(p);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

namespace {

Matrix elementwise(const Matrix& a, const Matrix& b, double sign) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix sum: dimension mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    auto bi = b.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) ci[j] += sign * bi[j];
  }
  return c;
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) { return elementwise(a, b, 1.0); }
Matrix operator-(const Matrix& a, const Matrix& b) { return elementwise(a, b, -1.0); }

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (double& x : c.row(i)) x *= s;
  return c;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("multiply: dimension mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector multiply_transpose(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw std::invalid_argument("multiply_transpose: dimension mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) axpy(x[i], a.row(i), y);
  return y;
}

Matrix transpose_multiply(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("transpose_multiply: dimension mismatch");
  Matrix c(a.cols(), b.cols());
  for (std::size_t p = 0; p < a.rows(); ++p) {
    auto ap = a.row(p);
    auto bp = b.row(p);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aip = ap[i];
      auto ci = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  // Scaled accumulation so large and tiny entries do not overflow or underflow.
  double scale = 0.0;
  double ssq = 1.0;
  for (double x : a) {
    if (x == 0.0) continue;
    const double ax = std::abs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

ThinQr qr_thin(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  if (n < k) throw std::invalid_argument("qr_thin: need rows >= cols");
  if (!a.all_finite()) throw std::invalid_argument("qr_thin: non-finite input");

  Matrix work = a;
  std::vector<Vector> reflectors(k);
  for (std::size_t j = 0; j < k; ++j) {
    Vector v(n - j);
    for (std::size_t i = j; i < n; ++i) v[i - j] = work(i, j);
    const double xnorm = norm2(v);
    if (xnorm == 0.0) continue;
    const double alpha = v[0] >= 0.0 ? -xnorm : xnorm;
    v[0] -= alpha;
    const double vnorm = norm2(v);
    if (vnorm == 0.0) continue;
    for (double& x : v) x /= vnorm;
    // work[j:, j:] -= 2 v (v^T work[j:, j:])
    for (std::size_t c = j; c < k; ++c) {
      double proj = 0.0;
      for (std::size_t i = j; i < n; ++i) proj += v[i - j] * work(i, c);
      proj *= 2.0;
      for (std::size_t i = j; i < n; ++i) work(i, c) -= proj * v[i - j];
    }
    reflectors[j] = std::move(v);
  }

  Matrix q(n, k);
  for (std::size_t j = 0; j < k; ++j) q(j, j) = 1.0;
  for (std::size_t jj = k; jj-- > 0;) {
    const Vector& v = reflectors[jj];
    if (v.empty()) continue;
    for (std::size_t c = 0; c < k; ++c) {
      double proj = 0.0;
      for (std::size_t i = jj; i < n; ++i) proj += v[i - jj] * q(i, c);
      proj *= 2.0;
      if (proj == 0.0) continue;
      for (std::size_t i = jj; i < n; ++i) q(i, c) -= proj * v[i - jj];
    }
  }

  Matrix r(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) r(i, j) = work(i, j);

  for (std::size_t j = 0; j < k; ++j) {
    if (r(j, j) >= 0.0) continue;
    for (std::size_t c = j; c < k; ++c) r(j, c) = -r(j, c);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
  }
  return {std::move(q), std::move(r)};
}

namespace {

Matrix symmetrized(const Matrix& a) {
  Matrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

}  // namespace

SymEig sym_eig(const Matrix& input) {
  if (input.rows() != input.cols()) throw std::invalid_argument("sym_eig: matrix not square");
  if (!input.all_finite()) throw std::invalid_argument("sym_eig: non-finite input");
  const std::size_t k = input.rows();
  Matrix a = symmetrized(input);
  Matrix v = Matrix::identity(k);

  const double total = a.frobenius_norm();
  constexpr int kMaxSweeps = 100;
  bool converged = k < 2 || total == 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * total) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < k; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (!converged) throw NumericFailure("sym_eig: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEig out{Matrix(k, k), Vector(k)};
  for (std::size_t j = 0; j < k; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t r = 0; r < k; ++r) out.vectors(r, j) = v(r, order[j]);
  }
  return out;
}

GenSymEig gen_sym_eig(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("gen_sym_eig: dimension mismatch");
  if (!a.all_finite() || !b.all_finite())
    throw std::invalid_argument("gen_sym_eig: non-finite input");
  const std::size_t k = a.rows();
  if (k == 0) return {};

  const SymEig metric = sym_eig(b);
  const double trace = std::accumulate(metric.values.begin(), metric.values.end(), 0.0);
  const double floor = 1e-12 * trace / static_cast<double>(k);
  if (!(trace > 0.0) || metric.values.front() <= floor)
    throw IllConditionedMetric("gen_sym_eig: metric matrix is not positive definite");

  // W = V diag(sigma^-1/2) turns the pencil into W^T A W.
  Matrix w = metric.vectors;
  for (std::size_t j = 0; j < k; ++j) {
    const double scale = 1.0 / std::sqrt(metric.values[j]);
    for (std::size_t i = 0; i < k; ++i) w(i, j) *= scale;
  }
  const Matrix whitened = transpose_multiply(w, symmetrized(a) * w);
  SymEig reduced = sym_eig(whitened);
  return {std::move(reduced.values), w * reduced.vectors};
}

SmallSolve solve_small(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) throw std::invalid_argument("solve_small: matrix not square");
  if (b.rows() != a.rows()) throw std::invalid_argument("solve_small: right-hand side mismatch");
  if (!a.all_finite() || !b.all_finite())
    throw std::invalid_argument("solve_small: non-finite input");
  const std::size_t k = a.rows();
  const double tol = 1e-14 * a.frobenius_norm();

  Matrix lu = a;
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t pivot = j;
    for (std::size_t i = j + 1; i < k; ++i)
      if (std::abs(lu(i, j)) > std::abs(lu(pivot, j))) pivot = i;
    if (std::abs(lu(pivot, j)) <= tol || lu(pivot, j) == 0.0)
      throw SingularSystem("solve_small: singular matrix at column " + std::to_string(j));
    if (pivot != j) {
      for (std::size_t c = 0; c < k; ++c) std::swap(lu(j, c), lu(pivot, c));
      std::swap(perm[j], perm[pivot]);
    }
    for (std::size_t i = j + 1; i < k; ++i) {
      const double f = lu(i, j) / lu(j, j);
      lu(i, j) = f;
      for (std::size_t c = j + 1; c < k; ++c) lu(i, c) -= f * lu(j, c);
    }
  }

  auto substitute = [&](const Matrix& rhs) {
    Matrix x(k, rhs.cols());
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t c = 0; c < rhs.cols(); ++c) x(i, c) = rhs(perm[i], c);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t p = 0; p < i; ++p) {
        const double l = lu(i, p);
        for (std::size_t c = 0; c < rhs.cols(); ++c) x(i, c) -= l * x(p, c);
      }
    for (std::size_t i = k; i-- > 0;) {
      for (std::size_t p = i + 1; p < k; ++p) {
        const double u = lu(i, p);
        for (std::size_t c = 0; c < rhs.cols(); ++c) x(i, c) -= u * x(p, c);
      }
      for (std::size_t c = 0; c < rhs.cols(); ++c) x(i, c) /= lu(i, i);
    }
    return x;
  };

  auto norm1 = [](const Matrix& m) {
    double best = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < m.rows(); ++r) s += std::abs(m(r, c));
      best = std::max(best, s);
    }
    return best;
  };

  SmallSolve out;
  out.x = substitute(b);
  out.condition = norm1(a) * norm1(substitute(Matrix::identity(k)));
  return out;
}

}  // namespace arcs
