#include "arcs/cubic_subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arcs {

double scalar_cubic_min(double gbar, double lam, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("scalar_cubic_min: mu must be positive");
  if (!std::isfinite(gbar) || !std::isfinite(lam) || !std::isfinite(mu))
    throw std::invalid_argument("scalar_cubic_min: non-finite input");
  if (gbar == 0.0) return lam >= 0.0 ? 0.0 : -lam / mu;
  const double root = std::sqrt(lam * lam + 4.0 * std::abs(gbar) * mu);
  if (lam >= 0.0) return -2.0 * gbar / (lam + root);
  // lam + root = 4|g|mu / (root - lam); the right side has no cancellation.
  const double magnitude = (root - lam) / (2.0 * mu);
  return gbar > 0.0 ? -magnitude : magnitude;
}

double scalar_cubic_value(double gbar, double lam, double mu, double s) {
  const double a = std::abs(s);
  return gbar * s + 0.5 * lam * s * s + mu / 3.0 * a * a * a;
}

Vector solve_parallel(const Vector& gbar_par, const Vector& lam_par, double mu) {
  if (gbar_par.size() != lam_par.size())
    throw std::invalid_argument("solve_parallel: length mismatch");
  Vector s(gbar_par.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = scalar_cubic_min(gbar_par[i], lam_par[i], mu);
  return s;
}

double solve_perp(double g_perp_norm, double delta, double mu) {
  if (!(g_perp_norm >= 0.0) || !(delta > 0.0) || !(mu > 0.0))
    throw std::invalid_argument("solve_perp: need g_perp_norm >= 0, delta > 0, mu > 0");
  return 2.0 / (delta + std::sqrt(delta * delta + 4.0 * mu * g_perp_norm));
}

SubproblemSolution solve(const Vector& g, const LsrEigFactors& eig, double mu,
                         ParallelCurvature curvature) {
  if (!(mu > 0.0)) throw std::invalid_argument("solve: mu must be positive");
  const std::size_t k = eig.rank();
  if (k > 0 && eig.upar.rows() != g.size())
    throw std::invalid_argument("solve: gradient length does not match U_par");

  SubproblemSolution out;
  Vector gbar_par = k > 0 ? multiply_transpose(eig.upar, g) : Vector{};
  Vector lam_par = eig.lam_hat;
  if (curvature == ParallelCurvature::shifted)
    for (double& l : lam_par) l += eig.delta;

  out.sbar_par = solve_parallel(gbar_par, lam_par, mu);

  const double g_sq = dot(g, g);
  const double par_sq = dot(gbar_par, gbar_par);
  out.g_perp_norm = std::sqrt(std::max(0.0, g_sq - par_sq));
  out.alpha_star = solve_perp(out.g_perp_norm, eig.delta, mu);

  // s* = -alpha g + U_par (sbar_par + alpha gbar_par)
  out.step = g;
  for (double& x : out.step) x *= -out.alpha_star;
  if (k > 0) {
    Vector coef = out.sbar_par;
    axpy(out.alpha_star, gbar_par, coef);
    axpy(1.0, multiply(eig.upar, coef), out.step);
  }

  double value = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    value += scalar_cubic_value(gbar_par[i], lam_par[i], mu, out.sbar_par[i]);
  const double t = out.alpha_star * out.g_perp_norm;
  value += -t * out.g_perp_norm + 0.5 * eig.delta * t * t + mu / 3.0 * t * t * t;
  out.model_value = value;
  out.pred_reduction = -value;
  return out;
}

Vector solve_dense(const Vector& gbar, const Vector& lambdas, double mu) {
  if (gbar.size() > 64) throw std::invalid_argument("solve_dense: refusing n > 64");
  return solve_parallel(gbar, lambdas, mu);
}

double norm3(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v) * v * v;
  return std::cbrt(s);
}

}  // namespace arcs
