#pragma once

#include "arcs/dense.hpp"
#include "arcs/lsr1_memory.hpp"

namespace arcs {

/// Which curvature the parallel block of the cubic model uses.
///   shifted: lam_hat + delta, the eigenvalues of B itself.
///   raw:     lam_hat alone.
enum class ParallelCurvature { shifted, raw };

struct SubproblemSolution {
  Vector step;             ///< s*, length n
  Vector sbar_par;         ///< U_par^T s*, length k
  double alpha_star = 0.0;
  double g_perp_norm = 0.0;
  double model_value = 0.0;
  double pred_reduction = 0.0;  ///< -model_value
};

/// Global minimizer of g s + lam s^2 / 2 + mu |s|^3 / 3.
///
/// Closed form -2g / (lam + sqrt(lam^2 + 4|g|mu)), evaluated without
/// cancellation when lam < 0. For g = 0 and lam < 0 both +-(-lam/mu) are
/// optimal; the positive root is returned.
double scalar_cubic_min(double gbar, double lam, double mu);

/// Value of the one-dimensional cubic at s.
double scalar_cubic_value(double gbar, double lam, double mu, double s);

/// Componentwise scalar_cubic_min over the parallel block.
Vector solve_parallel(const Vector& gbar_par, const Vector& lam_par, double mu);

/// alpha* = 2 / (delta + sqrt(delta^2 + 4 mu ||g_perp||)); the perpendicular
/// step is -alpha* g_perp.
double solve_perp(double g_perp_norm, double delta, double mu);

/// Minimizes the shape-changing-norm cubic model around the spectral form
/// of B without ever forming U_perp:
///   s* = -alpha* g + U_par (alpha* I - C_par) U_par^T g.
SubproblemSolution solve(const Vector& g, const LsrEigFactors& eig, double mu,
                         ParallelCurvature curvature = ParallelCurvature::shifted);

/// Full-eigenbasis solve: componentwise minimizer given gbar = U^T g and the
/// diagonal of Lambda. Oracle path, n <= 64.
Vector solve_dense(const Vector& gbar, const Vector& lambdas, double mu);

/// ||x||_3
double norm3(std::span<const double> x);

}  // namespace arcs
