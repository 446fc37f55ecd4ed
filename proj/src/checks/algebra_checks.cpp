#include <algorithm>
#include <cmath>
#include <sstream>

#include "arcs/arcs_solver.hpp"
#include "arcs/cubic_subproblem.hpp"
#include "arcs/datasets.hpp"
#include "arcs/problems.hpp"
#include "checks_internal.hpp"
#include "oracle.hpp"

namespace arcs::checks {

namespace {

std::string describe(std::size_t failures, std::size_t trials, double worst, const char* what) {
  std::ostringstream os;
  os << failures << "/" << trials << " failures, worst " << what << " " << worst;
  return os.str();
}

}  // namespace

CheckResult compact_representation(const CheckOptions&) {
  Rng rng(101);
  std::size_t failures = 0;
  double worst = 0.0;
  const std::size_t trials = 200;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = uniform_count(rng, 2, 10);
    const std::size_t k = uniform_count(rng, 1, std::min<std::size_t>(5, n));
    const RecursiveSr1 h = random_history(rng, n, k, uniform(rng, 0.5, 2.0));
    try {
      const Eigen::MatrixXd b = to_eigen(dense_b(build_compact(h.buffer, h.delta)));
      const double err = (b - h.b).norm() / std::max(1.0, h.b.norm());
      worst = std::max(worst, err);
      if (!(err < 1e-9)) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  return {1, "", failures == 0, describe(failures, trials, worst, "relative error")};
}

CheckResult eigendecomposition_fidelity(const CheckOptions&) {
  Rng rng(202);
  std::size_t failures = 0;
  double worst_eig = 0.0, worst_orth = 0.0;
  const std::size_t trials = 100;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = uniform_count(rng, 2, 10);
    const std::size_t k = uniform_count(rng, 1, std::min<std::size_t>(5, n));
    const RecursiveSr1 h = random_history(rng, n, k, uniform(rng, 0.5, 2.0));
    try {
      const LsrEigFactors f = partial_eig(build_compact(h.buffer, h.delta));
      std::vector<double> expected(f.lam_hat.begin(), f.lam_hat.end());
      for (double& v : expected) v += f.delta;
      expected.resize(n, f.delta);
      std::sort(expected.begin(), expected.end());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.b);
      const Eigen::VectorXd actual = es.eigenvalues();
      const double scale = std::max(1.0, actual.cwiseAbs().maxCoeff());
      double e = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        e = std::max(e, std::abs(actual(static_cast<Eigen::Index>(i)) - expected[i]) / scale);
      const Eigen::MatrixXd u = to_eigen(f.upar);
      const double orth =
          (u.transpose() * u - Eigen::MatrixXd::Identity(u.cols(), u.cols())).norm();
      worst_eig = std::max(worst_eig, e);
      worst_orth = std::max(worst_orth, orth);
      if (!(e <= 1e-8) || !(orth <= 1e-10)) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  std::ostringstream os;
  os << failures << "/" << trials << " failures, worst eigenvalue error " << worst_eig
     << ", worst orthonormality error " << worst_orth;
  return {2, "", failures == 0, os.str()};
}

CheckResult subproblem_optimality(const CheckOptions& opts) {
  const ScalarMinimizer scalar = opts.scalar ? opts.scalar : ScalarMinimizer(scalar_cubic_min);
  Rng rng(303);
  std::size_t grid_failures = 0, coords = 0, negative = 0, zero_g = 0;
  double worst_gap = 0.0;
  const int grid_points = 100000;
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = uniform_count(rng, 1, 5);
    for (std::size_t i = 0; i < k; ++i) {
      double g = std::normal_distribution<double>()(rng) * std::pow(10.0, uniform(rng, -2, 1));
      if (uniform(rng, 0, 1) < 0.2) g = 0.0;
      const double lam = std::normal_distribution<double>(0.0, 2.0)(rng);
      const double mu = std::pow(10.0, uniform(rng, -2, 1));
      negative += lam < 0;
      zero_g += g == 0.0;
      ++coords;
      const double s = scalar(g, lam, mu);
      const double radius = 2.0 * (std::abs(lam) / mu + std::sqrt(std::abs(g) / mu)) + 1.0;
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j <= grid_points; ++j) {
        const double x = -radius + 2.0 * radius * j / grid_points;
        best = std::min(best, g * x + 0.5 * lam * x * x + mu * std::abs(x) * x * x / 3.0);
      }
      const double value = g * s + 0.5 * lam * s * s + mu * std::abs(s) * s * s / 3.0;
      const double gap = value - best;
      worst_gap = std::max(worst_gap, gap / std::max(1.0, std::abs(best)));
      if (!(gap <= 1e-10 * std::max(1.0, std::abs(best)))) ++grid_failures;
    }
  }

  std::size_t basis_failures = 0;
  double worst_basis = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = uniform_count(rng, 3, 10);
    const std::size_t k = uniform_count(rng, 1, std::min<std::size_t>(5, n - 1));
    const RecursiveSr1 h = random_history(rng, n, k, uniform(rng, 0.5, 2.0));
    const double mu = std::pow(10.0, uniform(rng, -2, 1));
    const Eigen::VectorXd g = gaussian(rng, n);
    try {
      const LsrEigFactors f = partial_eig(build_compact(h.buffer, h.delta));
      const SubproblemSolution sol = solve(from_eigen(g), f, mu);
      const Eigen::MatrixXd upar = to_eigen(f.upar);
      const auto r = upar.cols();
      const auto N = static_cast<Eigen::Index>(n);
      Eigen::MatrixXd seed(N, N + r + 1);
      seed << upar, g - upar * (upar.transpose() * g), gaussian(rng, n, n);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(seed);
      const Eigen::MatrixXd u = qr.householderQ() * Eigen::MatrixXd::Identity(N, N);
      Vector lambdas(n, f.delta);
      for (Eigen::Index i = 0; i < r; ++i) lambdas[static_cast<std::size_t>(i)] += f.lam_hat[static_cast<std::size_t>(i)];
      const Eigen::VectorXd gbar = u.transpose() * g;
      const Eigen::VectorXd dense = u * to_eigen(solve_dense(from_eigen(gbar), lambdas, mu));
      const double err = (to_eigen(sol.step) - dense).norm() / std::max(1.0, dense.norm());
      worst_basis = std::max(worst_basis, err);
      if (!(err <= 1e-7)) ++basis_failures;
    } catch (const std::exception&) {
      ++basis_failures;
    }
  }
  std::ostringstream os;
  os << "grid: " << grid_failures << "/" << coords << " coordinates worse than the grid ("
     << negative << " with negative curvature, " << zero_g << " with zero gradient), worst gap "
     << worst_gap << "; basis: " << basis_failures << "/50 mismatches, worst " << worst_basis;
  return {3, "", grid_failures == 0 && basis_failures == 0 && negative > 0 && zero_g > 0,
          os.str()};
}

CheckResult holder_sandwich(const CheckOptions&) {
  Rng rng(404);
  std::size_t violations = 0;
  const std::size_t trials = 1000;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = uniform_count(rng, 1, 20);
    const Eigen::MatrixXd u = random_orthogonal(rng, n);
    const Eigen::VectorXd s = gaussian(rng, n) * std::pow(10.0, uniform(rng, -3, 3));
    const Eigen::VectorXd us = u.transpose() * s;
    const double n3 = norm3(std::span<const double>(us.data(), static_cast<std::size_t>(us.size())));
    const double n2 = s.norm();
    const double tol = 1e-12 * n2;
    if (n3 < std::pow(static_cast<double>(n), -1.0 / 6.0) * n2 - tol || n3 > n2 + tol) ++violations;
  }
  return {4, "", violations == 0,
          std::to_string(violations) + " violations in " + std::to_string(trials) + " trials"};
}

CheckResult sr1_curvature_recovery(const CheckOptions&) {
  Rng rng(505);
  std::size_t failures = 0;
  double worst = 0.0;
  const std::size_t trials = 50;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = uniform_count(rng, 2, 8);
    Eigen::MatrixXd a = gaussian(rng, n, n);
    a = (0.5 * (a + a.transpose())).eval();
    PairBuffer buffer(n);
    Sr1ModelOptions mopts;
    double delta = 1.0;
    try {
      for (int attempt = 0; buffer.size() < n && attempt < 20 * static_cast<int>(n); ++attempt) {
        const Sr1Model model = build_model(buffer, mopts, delta);
        delta = model.delta;
        const Eigen::VectorXd s = gaussian(rng, n);
        buffer.try_add_pair(from_eigen(s), from_eigen(a * s),
                            [&](const Vector& v) { return model.apply(v); });
      }
      const Sr1Model model = build_model(buffer, mopts, delta);
      if (buffer.size() < n || !model.compact) {
        ++failures;
        continue;
      }
      const double err = (to_eigen(dense_b(*model.compact)) - a).norm() / a.norm();
      worst = std::max(worst, err);
      if (!(err < 1e-6)) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  return {5, "", failures == 0, describe(failures, trials, worst, "relative error")};
}

CheckResult lemma1_bound(const CheckOptions&) {
  std::size_t checked = 0, violations = 0;
  double worst_ratio = 0.0;
  auto run = [&](const Objective& obj, const Vector& theta0, ArcsConfig cfg) {
    const double n = static_cast<double>(obj.dim());
    const double bound = std::sqrt(n) * cfg.delta_bounds.max +
                         static_cast<double>(cfg.memory) / (cfg.accept_eps * cfg.term_eps);
    minimize(obj, theta0, cfg, [&](const Sr1Model& model, const ArcsState&) {
      if (!model.compact) return;
      const double fro = dense_b(*model.compact).frobenius_norm();
      ++checked;
      worst_ratio = std::max(worst_ratio, fro / bound);
      if (!(fro <= bound)) ++violations;
    });
  };
  ArcsConfig cfg;
  cfg.k_max = 200;
  for (std::size_t n : {5, 10, 20, 50}) {
    for (double cond : {1e2, 1e4}) {
      const Quadratic q = Quadratic::random_dense(n, cond, 1000 + n);
      run(q, Vector(n, 0.0), cfg);
    }
  }
  for (std::size_t n : {2, 4, 10}) {
    const Rosenbrock r(n);
    Vector x0(n);
    for (std::size_t i = 0; i < n; ++i) x0[i] = i % 2 == 0 ? -1.2 : 1.0;
    ArcsConfig c = cfg;
    c.k_max = 1000;
    run(r, x0, c);
  }
  {
    BlobSpec spec;
    spec.classes = 3;
    spec.dim = 4;
    spec.seed = 9;
    auto ds = std::make_shared<Dataset>(synth_blobs(spec));
    const LogisticRegression lr(ds, 1e-3);
    run(lr, Vector(lr.dim(), 0.0), cfg);
  }
  std::ostringstream os;
  os << violations << " violations over " << checked << " models, largest ||B||_F / bound "
     << worst_ratio;
  return {6, "", violations == 0 && checked > 0, os.str()};
}

CheckResult deterministic_convergence(const CheckOptions&) {
  const Quadratic q = Quadratic::random_dense(50, 100.0, 7);
  ArcsConfig cfg;
  cfg.memory = 10;
  cfg.k_max = 200;
  cfg.grad_tol = 1e-5;
  const MinimizeResult rq = minimize(q, Vector(50, 0.0), cfg);
  const bool quad_ok = rq.grad_norm <= 1e-5;

  const Rosenbrock r(2);
  ArcsConfig rc;
  rc.k_max = 1000;
  rc.grad_tol = 0.0;
  std::size_t reached = 0;
  ArcsSolver solver(rc);
  solver.start(r, Vector{-1.2, 1.0});
  for (std::size_t k = 0; k < rc.k_max && !(solver.state().f < 1e-8); ++k) {
    if (solver.small_step() || norm2(solver.state().g) == 0.0) break;
    solver.step(r);
    reached = k + 1;
  }
  const bool rosen_ok = solver.state().f < 1e-8;
  std::ostringstream os;
  os << "quadratic n=50: ||g|| " << rq.grad_norm << " after " << rq.trace.size()
     << " iterations (" << to_string(rq.stop) << "); rosenbrock(2): f " << solver.state().f
     << " after " << reached << " iterations";
  return {7, "", quad_ok && rosen_ok, os.str()};
}

}  // namespace arcs::checks
