#include <cmath>
#include <random>
#include <stdexcept>

#include "arcs/arcs_solver.hpp"
#include "arcs/problems.hpp"
#include "doctest.h"

using namespace arcs;

namespace {

/// f is 1 at the origin and a fixed value everywhere else, so rho can be forced.
class ScriptedLine final : public Objective {
 public:
  explicit ScriptedLine(double f_trial) : f_trial_(f_trial) {}
  std::size_t dim() const override { return 1; }
  double value(const Vector& x) const override { return x[0] == 0.0 ? 1.0 : f_trial_; }
  Vector gradient(const Vector&) const override { return {1.0}; }

 private:
  double f_trial_;
};

}  // namespace

TEST_CASE("config validation") {
  ArcsConfig c;
  CHECK_NOTHROW(c.validate());
  c.eta1 = 0.8;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.mu0 = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.gamma2 = 0.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.memory = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("regularization update follows rho") {
  ArcsConfig c;
  c.mu0 = 2.0;
  SUBCASE("very successful step halves mu and moves") {
    ArcsSolver s(c);
    ScriptedLine obj(-100.0);
    s.start(obj, Vector{0.0});
    const IterRecord r = s.step(obj);
    CHECK(r.rho > c.eta2);
    CHECK(r.accepted);
    CHECK(s.state().mu == doctest::Approx(1.0));
    CHECK(s.state().theta[0] != 0.0);
  }
  SUBCASE("failed step keeps theta and multiplies mu by (gamma1 + gamma2) / 2") {
    ArcsSolver s(c);
    ScriptedLine obj(1.3);
    s.start(obj, Vector{0.0});
    const IterRecord r = s.step(obj);
    CHECK(r.rho < 0.0);
    CHECK_FALSE(r.accepted);
    CHECK(s.state().mu == doctest::Approx(3.0));
    CHECK(s.state().theta[0] == 0.0);
  }
}

TEST_CASE("first step on a unit quadratic is accepted with rho near 1") {
  ArcsConfig c;
  c.mu0 = 1e-6;
  const Quadratic q = Quadratic::centered(Vector(4, 0.0));
  ArcsSolver s(c);
  s.start(q, Vector{1.0, 0.0, 0.0, 0.0});
  const IterRecord r = s.step(q);
  CHECK(r.accepted);
  CHECK(r.rho == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(s.state().f < 0.5);
}

TEST_CASE("minimize reaches tight gradients on a centered quadratic") {
  Vector center(50);
  for (std::size_t i = 0; i < 50; ++i) center[i] = std::sin(1.0 + i);
  const Quadratic q = Quadratic::centered(center);
  ArcsConfig c;
  c.k_max = 200;
  const Vector x0(50, 0.0);
  const double g0 = norm2(q.gradient(x0));
  c.grad_tol = 1e-6 * g0;
  const MinimizeResult r = minimize(q, x0, c);
  CHECK(r.stop == StopReason::grad_tol);
  CHECK(r.grad_norm <= 1e-6 * g0);
}

TEST_CASE("minimize solves two-dimensional Rosenbrock") {
  ArcsConfig c;
  c.k_max = 1000;
  c.grad_tol = 1e-10;
  const MinimizeResult r = minimize(Rosenbrock(2), Vector{-1.2, 1.0}, c);
  CHECK(r.f < 1e-8);
}

TEST_CASE("a stationary start returns with no steps") {
  const Quadratic q = Quadratic::centered(Vector{1.0, 2.0});
  const MinimizeResult r = minimize(q, Vector{1.0, 2.0}, ArcsConfig{});
  CHECK(r.trace.empty());
  CHECK(r.stop == StopReason::grad_tol);
  CHECK(r.theta == Vector{1.0, 2.0});
}

TEST_CASE("mu ratios only take the three allowed values") {
  ArcsConfig c;
  c.k_max = 300;
  const Quadratic q = Quadratic::random_dense(20, 1e3, 3);
  ArcsSolver s(c);
  s.start(q, Vector(20, 0.0));
  for (int k = 0; k < 150 && norm2(s.state().g) > 0.0 && !s.small_step(); ++k) {
    const double before = s.state().mu;
    const IterRecord r = s.step(q);
    const double ratio = s.state().mu / before;
    if (s.state().mu == c.mu_min) continue;
    if (r.rho > c.eta2)
      CHECK(ratio == doctest::Approx(0.5));
    else if (r.rho >= c.eta1)
      CHECK(ratio == doctest::Approx(0.5 * (1.0 + c.gamma1)));
    else
      CHECK(ratio == doctest::Approx(0.5 * (c.gamma1 + c.gamma2)));
    CHECK(r.accepted == (r.rho >= c.eta1));
  }
}

TEST_CASE("accepted steps never increase f") {
  ArcsConfig c;
  c.k_max = 200;
  ArcsSolver s(c);
  const Rosenbrock r(4);
  s.start(r, Vector{-1.2, 1.0, -1.2, 1.0});
  double f = s.state().f;
  for (int k = 0; k < 200 && !s.small_step(); ++k) {
    s.step(r);
    CHECK(s.state().f <= f);
    f = s.state().f;
  }
}

TEST_CASE("model value matches a dense evaluation along a run") {
  ArcsConfig c;
  c.k_max = 40;
  const Quadratic q = Quadratic::random_dense(12, 1e2, 5);
  ArcsSolver s(c);
  s.start(q, Vector(12, 0.0));
  for (int k = 0; k < 40 && !s.small_step() && norm2(s.state().g) > 1e-12; ++k) {
    const ModelCheckReport rep = model_decrease_check(s.state(), c);
    CHECK(std::abs(rep.difference) < 1e-8 * std::max(1.0, std::abs(rep.direct_value)));
    s.step(q);
  }
}

TEST_CASE("model check on a zero gradient and on negative curvature") {
  LsrEigFactors eig;
  eig.delta = 1.0;
  eig.upar = Matrix(2, 0);
  Sr1Model m;
  m.eig = eig;
  const ModelCheckReport zero = model_decrease_check(Vector{0.0, 0.0}, m, 1.0);
  CHECK(zero.subspace_value == 0.0);
  CHECK(zero.direct_value == 0.0);

  PairBuffer buf(1);
  REQUIRE(buf.try_add_pair_with_product(Vector{1.0, 0.0, 0.0}, Vector{-2.0, 0.0, 0.0},
                                        Vector{1.0, 0.0, 0.0}));
  const Sr1Model neg = build_model(buf, {}, 1.0);
  const ModelCheckReport rep = model_decrease_check(Vector{0.3, -0.2, 0.5}, neg, 0.7);
  CHECK(rep.subspace_value < 0.0);
  CHECK(rep.direct_value < 0.0);
  CHECK(std::abs(rep.difference) < 1e-8);
}

TEST_CASE("a non-finite objective stops with numeric_failure") {
  class Blowup final : public Objective {
   public:
    std::size_t dim() const override { return 1; }
    double value(const Vector& x) const override { return x[0] == 0.0 ? 0.0 : NAN; }
    Vector gradient(const Vector&) const override { return {1.0}; }
  } obj;
  const MinimizeResult r = minimize(obj, Vector{0.0}, ArcsConfig{});
  CHECK(r.stop == StopReason::numeric_failure);
}
