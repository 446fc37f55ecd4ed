#include <cmath>
#include <stdexcept>

#include "arcs/baselines.hpp"
#include "arcs/errors.hpp"
#include "arcs/problems.hpp"
#include "doctest.h"

using namespace arcs;

TEST_CASE("method names round-trip") {
  for (auto m : {BaselineMethod::sgd_momentum, BaselineMethod::adagrad, BaselineMethod::rmsprop,
                 BaselineMethod::adam, BaselineMethod::lbfgs})
    CHECK(baseline_method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(baseline_method_from_string("newton"), std::invalid_argument);
}

TEST_CASE("sgd momentum first step") {
  BaselineConfig c = BaselineConfig::defaults(BaselineMethod::sgd_momentum);
  c.learning_rate = 0.1;
  c.momentum = 0.9;
  FirstOrderState st;
  Vector theta{0.0, 0.0};
  baseline_step(c, st, Vector{1.0, 0.0}, theta);
  CHECK(theta[0] == doctest::Approx(-0.1));
  CHECK(st.velocity[0] == doctest::Approx(-0.1));
  baseline_step(c, st, Vector{0.0, 0.0}, theta);
  CHECK(st.velocity[0] == doctest::Approx(-0.09));
  CHECK(theta[0] == doctest::Approx(-0.19));
}

TEST_CASE("adam first step is bias corrected") {
  const BaselineConfig c = BaselineConfig::defaults(BaselineMethod::adam);
  CHECK(c.learning_rate == 1e-3);
  CHECK(c.eps_perturbation == 1e-6);
  FirstOrderState st;
  Vector theta{0.5, 0.5};
  baseline_step(c, st, Vector{1.0, 0.0}, theta);
  CHECK(theta[0] == doctest::Approx(0.5 - 1e-3 / (1.0 + 1e-6)).epsilon(1e-12));
  CHECK(theta[1] == 0.5);
}

TEST_CASE("adagrad and rmsprop first steps") {
  FirstOrderState a;
  Vector ta{0.0};
  const BaselineConfig ca = BaselineConfig::defaults(BaselineMethod::adagrad);
  baseline_step(ca, a, Vector{2.0}, ta);
  CHECK(ta[0] == doctest::Approx(-ca.learning_rate * 2.0 / (2.0 + ca.eps_perturbation)));

  FirstOrderState r;
  Vector tr{0.0};
  const BaselineConfig cr = BaselineConfig::defaults(BaselineMethod::rmsprop);
  baseline_step(cr, r, Vector{2.0}, tr);
  const double e = (1.0 - cr.alpha_rms) * 4.0;
  CHECK(tr[0] == doctest::Approx(-cr.learning_rate * 2.0 / (std::sqrt(e) + cr.eps_perturbation)));
}

TEST_CASE("a zero gradient leaves adaptive methods in place") {
  for (auto m : {BaselineMethod::adagrad, BaselineMethod::rmsprop, BaselineMethod::adam,
                 BaselineMethod::sgd_momentum}) {
    FirstOrderState st;
    Vector theta{1.0, -2.0};
    baseline_step(BaselineConfig::defaults(m), st, Vector{0.0, 0.0}, theta);
    CHECK(theta == Vector{1.0, -2.0});
  }
}

TEST_CASE("a non-finite gradient is a numeric failure") {
  FirstOrderState st;
  Vector theta{0.0};
  CHECK_THROWS_AS(
      baseline_step(BaselineConfig::defaults(BaselineMethod::adam), st, Vector{NAN}, theta),
      NumericFailure);
}

TEST_CASE("lbfgs converges on a quadratic") {
  const Quadratic q = Quadratic::random_dense(20, 10.0, 41);
  BaselineConfig c = BaselineConfig::defaults(BaselineMethod::lbfgs);
  c.lbfgs_tol = 1e-8;
  c.max_iter = 60;
  const MinimizeResult r = lbfgs_minimize(q, Vector(20, 0.0), c);
  CHECK(r.grad_norm < 1e-8);
  CHECK(r.trace.size() <= 60);
}

TEST_CASE("lbfgs solves two-dimensional Rosenbrock") {
  BaselineConfig c = BaselineConfig::defaults(BaselineMethod::lbfgs);
  c.max_iter = 500;
  const MinimizeResult r = lbfgs_minimize(Rosenbrock(2), Vector{-1.2, 1.0}, c);
  CHECK(r.f < 1e-8);
}

TEST_CASE("lbfgs returns immediately from a stationary point") {
  const Quadratic q = Quadratic::centered(Vector{3.0});
  const MinimizeResult r =
      lbfgs_minimize(q, Vector{3.0}, BaselineConfig::defaults(BaselineMethod::lbfgs));
  CHECK(r.trace.empty());
  CHECK(r.stop == StopReason::grad_tol);
}

TEST_CASE("first-order full-batch runs decrease a quadratic") {
  const Quadratic q = Quadratic::centered(Vector{1.0, -1.0, 2.0});
  for (auto m : {BaselineMethod::sgd_momentum, BaselineMethod::adagrad, BaselineMethod::rmsprop,
                 BaselineMethod::adam}) {
    BaselineConfig c = BaselineConfig::defaults(m);
    c.max_iter = 300;
    const MinimizeResult r = first_order_minimize(q, Vector(3, 0.0), c);
    CHECK(r.f < q.value(Vector(3, 0.0)));
    CHECK(r.trace.size() == 300);
  }
}

TEST_CASE("config validation") {
  BaselineConfig c = BaselineConfig::defaults(BaselineMethod::adam);
  c.beta1 = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = BaselineConfig::defaults(BaselineMethod::lbfgs);
  c.lbfgs_memory = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
