#include <cmath>
#include <random>
#include <stdexcept>

#include "arcs/dense.hpp"
#include "arcs/errors.hpp"
#include "doctest.h"

using namespace arcs;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = n(rng);
  return a;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

Matrix diag(const Vector& v) {
  Matrix d(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d(i, i) = v[i];
  return d;
}

}  // namespace

TEST_CASE("qr_thin of a single column") {
  const ThinQr f = qr_thin(Matrix{{3.0}, {4.0}});
  CHECK(f.q(0, 0) == doctest::Approx(0.6));
  CHECK(f.q(1, 0) == doctest::Approx(0.8));
  CHECK(f.r(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("qr_thin of the identity") {
  const ThinQr f = qr_thin(Matrix::identity(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(f.q(i, j)) == doctest::Approx(i == j ? 1.0 : 0.0));
      CHECK(f.r(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
    }
}

TEST_CASE("qr_thin reconstructs random tall matrices") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const Matrix a = random_matrix(rng, 8, 4);
    const ThinQr f = qr_thin(a);
    CHECK(max_abs_diff(f.q * f.r, a) < 1e-12);
    CHECK(max_abs_diff(transpose_multiply(f.q, f.q), Matrix::identity(4)) < 1e-12);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(f.r(i, i) >= 0.0);
      for (std::size_t j = 0; j < i; ++j) CHECK(f.r(i, j) == 0.0);
    }
  }
}

TEST_CASE("qr_thin rejects wide input") {
  CHECK_THROWS_AS(qr_thin(Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("qr_thin keeps Q orthonormal for rank-deficient input") {
  Matrix a(5, 2);
  for (std::size_t i = 0; i < 5; ++i) a(i, 0) = a(i, 1) = static_cast<double>(i + 1);
  const ThinQr f = qr_thin(a);
  CHECK(max_abs_diff(transpose_multiply(f.q, f.q), Matrix::identity(2)) < 1e-12);
  CHECK(std::abs(f.r(1, 1)) < 1e-12);
}

TEST_CASE("sym_eig small cases") {
  const SymEig d = sym_eig(Matrix{{5.0, 0.0}, {0.0, 2.0}});
  CHECK(d.values[0] == doctest::Approx(2.0));
  CHECK(d.values[1] == doctest::Approx(5.0));
  CHECK(std::abs(d.vectors(1, 0)) == doctest::Approx(1.0));

  const SymEig s = sym_eig(Matrix{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(s.values[0] == doctest::Approx(-1.0));
  CHECK(s.values[1] == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    Matrix a = random_matrix(rng, 5, 5);
    a = 0.5 * (a + a.transpose());
    const SymEig d = sym_eig(a);
    CHECK(max_abs_diff(d.vectors * diag(d.values) * d.vectors.transpose(), a) < 1e-10);
    for (std::size_t i = 1; i < 5; ++i) CHECK(d.values[i - 1] <= d.values[i]);
  }
}

TEST_CASE("sym_eig rejects non-finite input") {
  CHECK_THROWS_AS(sym_eig(Matrix{{NAN, 0.0}, {0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("gen_sym_eig reduces to sym_eig for B = I") {
  const GenSymEig d = gen_sym_eig(Matrix{{3.0, 0.0}, {0.0, 5.0}}, Matrix::identity(2));
  CHECK(d.values[0] == doctest::Approx(3.0));
  CHECK(d.values[1] == doctest::Approx(5.0));
}

TEST_CASE("gen_sym_eig of a proportional pencil") {
  std::mt19937_64 rng(13);
  const Matrix g = random_matrix(rng, 4, 4);
  const Matrix b = transpose_multiply(g, g) + Matrix::identity(4);
  const GenSymEig d = gen_sym_eig(2.0 * b, b);
  for (double v : d.values) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("gen_sym_eig eigenpairs satisfy A u = lambda B u with B-orthonormal u") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 20; ++t) {
    const Matrix g = random_matrix(rng, 4, 4);
    const Matrix b = transpose_multiply(g, g) + 0.5 * Matrix::identity(4);
    Matrix a = random_matrix(rng, 4, 4);
    a = 0.5 * (a + a.transpose());
    const GenSymEig d = gen_sym_eig(a, b);
    const Matrix lhs = a * d.vectors;
    const Matrix rhs = b * d.vectors * diag(d.values);
    CHECK(max_abs_diff(lhs, rhs) < 1e-9);
    CHECK(max_abs_diff(transpose_multiply(d.vectors, b * d.vectors), Matrix::identity(4)) < 1e-9);
  }
}

TEST_CASE("gen_sym_eig refuses an indefinite metric") {
  CHECK_THROWS_AS(gen_sym_eig(Matrix::identity(2), Matrix{{1.0, 0.0}, {0.0, -1.0}}),
                  IllConditionedMetric);
}

TEST_CASE("solve_small") {
  const Matrix x{{1.0, 2.0}, {3.0, 4.0}};
  CHECK(max_abs_diff(solve_small(Matrix::identity(2), x).x, x) == 0.0);

  const SmallSolve s = solve_small(Matrix{{2.0, 0.0}, {0.0, 4.0}}, Matrix{{2.0}, {8.0}});
  CHECK(s.x(0, 0) == doctest::Approx(1.0));
  CHECK(s.x(1, 0) == doctest::Approx(2.0));

  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_matrix(rng, 5, 5) + 5.0 * Matrix::identity(5);
    const Matrix b = random_matrix(rng, 5, 2);
    CHECK(max_abs_diff(a * solve_small(a, b).x, b) < 1e-10);
  }

  CHECK_THROWS_AS(solve_small(Matrix{{1.0, 2.0}, {2.0, 4.0}}, Matrix{{1.0}, {1.0}}),
                  SingularSystem);
}

TEST_CASE("vector kernels") {
  const Vector a{1.0, 2.0, 2.0};
  CHECK(norm2(a) == doctest::Approx(3.0));
  CHECK(dot(a, Vector{1.0, 0.0, -1.0}) == doctest::Approx(-1.0));
  Vector y{1.0, 1.0, 1.0};
  axpy(2.0, a, y);
  CHECK(y == Vector{3.0, 5.0, 5.0});
  CHECK_FALSE(all_finite(Vector{1.0, INFINITY}));
}
