#include <cmath>
#include <random>
#include <stdexcept>

#include "arcs/cubic_subproblem.hpp"
#include "doctest.h"

using namespace arcs;

namespace {

/// Grid search over [-r, r] refined by golden-section around the best cell.
double grid_min(double g, double lam, double mu) {
  const double r = 4.0 * (std::abs(lam) / mu + std::sqrt(std::abs(g) / mu) + 1.0);
  const int points = 200000;
  double best = 0.0, best_val = scalar_cubic_value(g, lam, mu, 0.0);
  for (int i = 0; i <= points; ++i) {
    const double s = -r + 2.0 * r * i / points;
    const double v = scalar_cubic_value(g, lam, mu, s);
    if (v < best_val) best_val = v, best = s;
  }
  double a = best - 2.0 * r / points, b = best + 2.0 * r / points;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 200; ++i) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (scalar_cubic_value(g, lam, mu, c) < scalar_cubic_value(g, lam, mu, d))
      b = d;
    else
      a = c;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("scalar cubic minimizer examples") {
  CHECK(scalar_cubic_min(0.0, 2.0, 1.0) == 0.0);
  CHECK(scalar_cubic_min(-3.0, 0.0, 3.0) == doctest::Approx(1.0));
  CHECK(scalar_cubic_min(1.0, -2.0, 1.0) == doctest::Approx(-1.0 - std::sqrt(2.0)));
  CHECK(scalar_cubic_min(0.0, -2.0, 1.0) == doctest::Approx(2.0));
  CHECK(scalar_cubic_value(0.0, -2.0, 1.0, 2.0) ==
        doctest::Approx(scalar_cubic_value(0.0, -2.0, 1.0, -2.0)));
}

TEST_CASE("scalar cubic minimizer rejects mu <= 0") {
  CHECK_THROWS_AS(scalar_cubic_min(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("scalar cubic minimizer matches a grid search") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 40; ++t) {
    const double g = u(rng), lam = u(rng), mu = std::exp(u(rng) / 2.0);
    const double s = scalar_cubic_min(g, lam, mu);
    const double ref = grid_min(g, lam, mu);
    CHECK(scalar_cubic_value(g, lam, mu, s) <= scalar_cubic_value(g, lam, mu, ref) + 1e-10);
  }
}

TEST_CASE("solve_parallel is componentwise") {
  const Vector s = solve_parallel(Vector{-3.0, 1.0}, Vector{0.0, -2.0}, 1.0);
  CHECK(s[0] == doctest::Approx(scalar_cubic_min(-3.0, 0.0, 1.0)));
  CHECK(s[1] == doctest::Approx(-1.0 - std::sqrt(2.0)));
  const Vector z = solve_parallel(Vector{0.0, 0.0}, Vector{1.0, 2.0}, 1.0);
  CHECK(z == Vector{0.0, 0.0});
}

TEST_CASE("solve_perp examples") {
  CHECK(solve_perp(0.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(solve_perp(2.0, 1.0, 1.0) == doctest::Approx(0.5));
  const double t = solve_perp(2.0, 1.0, 1.0) * 2.0;
  CHECK(-2.0 + t + t * t == doctest::Approx(0.0));
  CHECK(solve_perp(2.0, 1.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solve with a zero gradient") {
  LsrEigFactors eig;
  eig.delta = 1.0;
  eig.upar = Matrix(3, 0);
  const SubproblemSolution sol = solve(Vector(3, 0.0), eig, 1.0);
  CHECK(sol.step == Vector(3, 0.0));
  CHECK(sol.model_value == 0.0);
  CHECK(sol.pred_reduction == 0.0);
}

TEST_CASE("solve without history steps along -g") {
  LsrEigFactors eig;
  eig.delta = 1.0;
  eig.upar = Matrix(2, 0);
  const Vector g{0.0, 2.0};
  const SubproblemSolution sol = solve(g, eig, 1.0);
  CHECK(sol.alpha_star == doctest::Approx(0.5));
  CHECK(sol.step[0] == doctest::Approx(0.0));
  CHECK(sol.step[1] == doctest::Approx(-1.0));
  CHECK(sol.model_value == doctest::Approx(-2.0 + 0.5 + 1.0 / 3.0));
  CHECK(sol.pred_reduction == doctest::Approx(-sol.model_value));
}

TEST_CASE("solve on an axis-aligned basis matches solve_dense") {
  LsrEigFactors eig;
  eig.delta = 1.0;
  eig.upar = Matrix(3, 2);
  eig.upar(0, 0) = 1.0;
  eig.upar(1, 1) = 1.0;
  eig.lam_hat = {-1.0, -3.0};
  const Vector g{-3.0, 1.0, 2.0};
  const double mu = 1.0;
  const SubproblemSolution sol = solve(g, eig, mu);
  const Vector dense = solve_dense(g, Vector{0.0, -2.0, 1.0}, mu);
  for (std::size_t i = 0; i < 3; ++i) CHECK(sol.step[i] == doctest::Approx(dense[i]));
}

TEST_CASE("norm3") {
  CHECK(norm3(Vector{}) == 0.0);
  CHECK(norm3(Vector{3.0, 0.0}) == doctest::Approx(3.0));
  CHECK(norm3(Vector{1.0, 1.0}) == doctest::Approx(std::cbrt(2.0)));
}
