#include <cmath>
#include <random>
#include <stdexcept>

#include "arcs/errors.hpp"
#include "arcs/lsr1_memory.hpp"
#include "doctest.h"

using namespace arcs;

namespace {

Vector unit(std::size_t n, std::size_t i) {
  Vector e(n, 0.0);
  e[i] = 1.0;
  return e;
}

LinearMap scaled_identity(double delta) {
  return [delta](const Vector& v) {
    Vector r = v;
    for (double& x : r) x *= delta;
    return r;
  };
}

Vector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vector v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("pair acceptance") {
  PairBuffer buf(5, 1e-8);
  SUBCASE("nonzero denominator is accepted") {
    CHECK(buf.try_add_pair(unit(3, 0), Vector{2.0, 0.0, 0.0}, scaled_identity(1.0)));
    CHECK(buf.size() == 1);
  }
  SUBCASE("residual orthogonal to s is rejected") {
    CHECK_FALSE(buf.accepts(unit(3, 0), Vector{1.0, 1.0, 0.0}, unit(3, 0)));
  }
  SUBCASE("y = Bs is rejected") {
    CHECK_FALSE(buf.try_add_pair(unit(3, 0), unit(3, 0), scaled_identity(1.0)));
    CHECK(buf.empty());
  }
  SUBCASE("non-finite pairs are refused") {
    CHECK_THROWS_AS(buf.try_add_pair(Vector{NAN, 0.0, 0.0}, unit(3, 0), scaled_identity(1.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("the buffer is FIFO with bounded capacity") {
  PairBuffer buf(2);
  for (std::size_t i = 0; i < 3; ++i) {
    Vector y = unit(4, i);
    y[i] = 3.0;
    CHECK(buf.try_add_pair(unit(4, i), y, scaled_identity(1.0)));
  }
  CHECK(buf.size() == 2);
  CHECK(buf.pairs().front().s == unit(4, 1));
  CHECK(buf.pairs().back().s == unit(4, 2));
}

TEST_CASE("spectral shift") {
  SUBCASE("orthonormal S gives the smallest eigenvalue of S^T Y") {
    PairBuffer buf(2);
    CHECK(buf.try_add_pair_with_product(unit(3, 0), Vector{3.0, 0.0, 0.0}, unit(3, 0)));
    CHECK(buf.try_add_pair_with_product(unit(3, 1), Vector{0.0, 5.0, 0.0}, unit(3, 1)));
    const SpectralShift s = spectral_shift(buf, {});
    CHECK_FALSE(s.fallback);
    CHECK(s.raw == doctest::Approx(3.0));
    CHECK(s.delta == doctest::Approx(3.0));
  }
  SUBCASE("a negative eigenvalue clamps to the lower bound") {
    PairBuffer buf(1);
    CHECK(buf.try_add_pair_with_product(unit(2, 0), Vector{-2.0, 0.0}, unit(2, 0)));
    const SpectralShift s = spectral_shift(buf, {});
    CHECK(s.raw == doctest::Approx(-2.0));
    CHECK(s.delta == 1e-8);
  }
  SUBCASE("the scale multiplies before clamping") {
    PairBuffer buf(1);
    CHECK(buf.try_add_pair_with_product(unit(2, 0), Vector{4.0, 0.0}, unit(2, 0)));
    CHECK(spectral_shift(buf, {}, 0.0, 0.5).delta == doctest::Approx(2.0));
  }
}

TEST_CASE("single-pair compact representation") {
  PairBuffer buf(1);
  REQUIRE(buf.try_add_pair(unit(3, 0), Vector{3.0, 0.0, 0.0}, scaled_identity(1.0)));
  const CompactSr1 c = build_compact(buf, 1.0);
  CHECK(c.psi(0, 0) == doctest::Approx(2.0));
  CHECK(c.psi(1, 0) == 0.0);
  CHECK(c.mmat(0, 0) == doctest::Approx(2.0));

  const Vector b1 = apply_b(c, unit(3, 0));
  CHECK(b1[0] == doctest::Approx(3.0));
  CHECK(b1[1] == doctest::Approx(0.0));

  const LsrEigFactors e = partial_eig(c);
  REQUIRE(e.rank() == 1);
  CHECK(e.lam_hat[0] == doctest::Approx(2.0));
  CHECK(std::abs(e.upar(0, 0)) == doctest::Approx(1.0));

  const Matrix d = dense_b(c);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(d(i, j) == doctest::Approx(i == j ? (i == 0 ? 3.0 : 1.0) : 0.0));
}

TEST_CASE("empty history cannot build a compact form") {
  PairBuffer buf(3);
  CHECK_THROWS(build_compact(buf, 1.0));
  const Sr1Model m = build_model(buf, {}, 0.0);
  CHECK_FALSE(m.has_history());
  CHECK(m.delta == 1.0);
  CHECK(m.apply(Vector{2.0, -1.0}) == Vector{2.0, -1.0});
}

TEST_CASE("orthonormal Psi with identity middle matrix has unit eigenvalues") {
  CompactSr1 c;
  c.delta = 0.5;
  c.psi = Matrix(4, 2);
  c.psi(0, 0) = 1.0;
  c.psi(2, 1) = 1.0;
  c.mmat = Matrix::identity(2);
  const LsrEigFactors e = partial_eig(c);
  for (double l : e.lam_hat) CHECK(l == doctest::Approx(1.0));
}

TEST_CASE("spectral form agrees with apply_b on random histories") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 10;
    PairBuffer buf(3);
    Sr1Model model = build_model(buf, {}, 0.0);
    while (buf.size() < 3) {
      const Vector s = random_vector(rng, n);
      const Vector y = random_vector(rng, n);
      buf.try_add_pair(s, y, [&](const Vector& v) { return model.apply(v); });
      model = build_model(buf, {}, model.delta);
    }
    REQUIRE(model.compact);
    const Vector v = random_vector(rng, n);
    const Vector direct = apply_b(*model.compact, v);
    Vector spectral = v;
    for (double& x : spectral) x *= model.eig.delta;
    const Vector coeff = multiply_transpose(model.eig.upar, v);
    Vector scaled(coeff.size());
    for (std::size_t i = 0; i < coeff.size(); ++i) scaled[i] = model.eig.lam_hat[i] * coeff[i];
    axpy(1.0, multiply(model.eig.upar, scaled), spectral);
    Vector diff = spectral;
    axpy(-1.0, direct, diff);
    CHECK(norm2(diff) <= 1e-8 * norm2(direct));
  }
}

TEST_CASE("pairs from a symmetric matrix satisfy the secant condition") {
  std::mt19937_64 rng(22);
  const std::size_t n = 6;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = random_vector(rng, 1)[0];
  PairBuffer buf(3);
  Sr1Model model = build_model(buf, {}, 0.0);
  while (buf.size() < 3) {
    const Vector s = random_vector(rng, n);
    buf.try_add_pair(s, multiply(a, s), [&](const Vector& v) { return model.apply(v); });
    model = build_model(buf, {}, model.delta);
  }
  for (const auto& p : buf.pairs()) {
    Vector r = apply_b(*model.compact, p.s);
    axpy(-1.0, p.y, r);
    CHECK(norm2(r) <= 1e-8 * norm2(p.y));
  }
}

TEST_CASE("dense_b refuses large dimensions") {
  CompactSr1 c;
  c.psi = Matrix(65, 1);
  c.mmat = Matrix::identity(1);
  CHECK_THROWS_AS(dense_b(c), std::invalid_argument);
}
