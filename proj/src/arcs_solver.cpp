#include "arcs/arcs_solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "arcs/errors.hpp"

namespace arcs {

void ArcsConfig::validate() const {
  if (!(mu0 > 0.0)) throw std::invalid_argument("ArcsConfig: mu0 must be > 0");
  if (!(eta1 > 0.0 && eta1 <= eta2 && eta2 < 1.0))
    throw std::invalid_argument("ArcsConfig: need 0 < eta1 <= eta2 < 1");
  if (!(gamma2 >= gamma1)) throw std::invalid_argument("ArcsConfig: need gamma2 >= gamma1");
  if (!(accept_eps > 0.0)) throw std::invalid_argument("ArcsConfig: accept_eps must be > 0");
  if (!(term_eps > 0.0)) throw std::invalid_argument("ArcsConfig: term_eps must be > 0");
  if (memory == 0) throw std::invalid_argument("ArcsConfig: memory must be > 0");
  if (k_max == 0) throw std::invalid_argument("ArcsConfig: k_max must be > 0");
  if (!(grad_tol >= 0.0)) throw std::invalid_argument("ArcsConfig: grad_tol must be >= 0");
  if (!(delta_bounds.min > 0.0 && delta_bounds.max >= delta_bounds.min))
    throw std::invalid_argument("ArcsConfig: need 0 < delta_min <= delta_max");
  if (!(shift_scale > 0.0 && shift_scale <= 1.0))
    throw std::invalid_argument("ArcsConfig: shift_scale must be in (0, 1]");
  if (!(mu_min > 0.0 && mu_min <= mu0)) throw std::invalid_argument("ArcsConfig: need 0 < mu_min <= mu0");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::max_iter: return "max_iter";
    case StopReason::small_step: return "small_step";
    case StopReason::grad_tol: return "grad_tol";
    case StopReason::numeric_failure: return "numeric_failure";
  }
  return "unknown";
}

namespace {

Sr1ModelOptions model_options(const ArcsConfig& cfg) {
  Sr1ModelOptions o;
  o.bounds = cfg.delta_bounds;
  o.shift_scale = cfg.shift_scale;
  return o;
}

}  // namespace

ArcsSolver::ArcsSolver(ArcsConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  state_.buffer = PairBuffer(cfg_.memory, cfg_.accept_eps);
  state_.mu = cfg_.mu0;
}

void ArcsSolver::reset_point(const Objective& obj, const Vector& theta) {
  if (theta.size() != obj.dim()) throw std::invalid_argument("ArcsSolver: dimension mismatch");
  if (!all_finite(theta)) throw std::invalid_argument("ArcsSolver: non-finite starting point");
  state_.theta = theta;
  state_.f = obj.value_and_gradient(state_.theta, state_.g);
  state_.stamp = obj.sample_stamp();
  if (!std::isfinite(state_.f) || !all_finite(state_.g))
    throw NumericFailure("ArcsSolver: non-finite objective at starting point");
}

void ArcsSolver::start(const Objective& obj, const Vector& theta) {
  state_.buffer.clear();
  state_.mu = cfg_.mu0;
  state_.k = 0;
  state_.delta = 0.0;
  state_.last_step.clear();
  state_.last_secant_residual.clear();
  reset_point(obj, theta);
}

bool ArcsSolver::small_step() const {
  if (state_.last_step.empty()) return false;
  return norm2(state_.last_step) < cfg_.term_eps * norm2(state_.last_secant_residual);
}

IterRecord ArcsSolver::step(const Objective& obj) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (state_.theta.empty()) throw std::logic_error("ArcsSolver::step before start");
  if (obj.sample_stamp() != state_.stamp)
    throw std::logic_error("ArcsSolver: gradient pair would mix sample sets");

  IterRecord rec;
  rec.k = state_.k;
  rec.mu = state_.mu;

  const double gnorm = norm2(state_.g);
  if (gnorm == 0.0) {
    rec.f_value = state_.f;
    rec.rho = std::nan("");
    rec.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
    state_.last_step.assign(state_.theta.size(), 0.0);
    state_.last_secant_residual.assign(state_.theta.size(), 0.0);
    ++state_.k;
    return rec;
  }

  const Sr1Model model = build_model(state_.buffer, model_options(cfg_), state_.delta);
  state_.delta = model.delta;
  if (observer_) observer_(model, state_);

  const SubproblemSolution sol = solve(state_.g, model.eig, state_.mu, cfg_.parallel_curvature);
  if (!(sol.pred_reduction > 0.0))
    throw NumericFailure("ArcsSolver: subproblem gave no predicted reduction at a nonzero gradient");

  Vector trial = state_.theta;
  axpy(1.0, sol.step, trial);
  Vector g_trial;
  const double f_trial = obj.value_and_gradient(trial, g_trial);
  if (!std::isfinite(f_trial) || !all_finite(g_trial))
    throw NumericFailure("ArcsSolver: non-finite objective at iteration " + std::to_string(state_.k));

  const double rho = (state_.f - f_trial) / sol.pred_reduction;
  rec.rho = rho;
  rec.step_norm = norm2(sol.step);
  rec.accepted = rho >= cfg_.eta1;

  double factor = 0.5 * (cfg_.gamma1 + cfg_.gamma2);
  if (rho > cfg_.eta2)
    factor = 0.5;
  else if (rho >= cfg_.eta1)
    factor = 0.5 * (1.0 + cfg_.gamma1);
  state_.mu = std::max(state_.mu * factor, cfg_.mu_min);

  Vector y = g_trial;
  axpy(-1.0, state_.g, y);
  const Vector bs = model.apply(sol.step);
  Vector residual = y;
  axpy(-1.0, bs, residual);
  if (norm2(sol.step) >= cfg_.term_eps * norm2(residual))
    rec.pair_accepted = state_.buffer.try_add_pair_with_product(sol.step, y, bs);

  if (rec.accepted) {
    state_.last_step = sol.step;
    state_.last_secant_residual = std::move(residual);
    state_.theta = std::move(trial);
    state_.f = f_trial;
    state_.g = std::move(g_trial);
  }
  ++state_.k;
  rec.f_value = state_.f;
  rec.grad_norm = norm2(state_.g);
  rec.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
  return rec;
}

MinimizeResult minimize(const Objective& obj, const Vector& theta0, const ArcsConfig& cfg,
                        const ModelObserver& observer) {
  ArcsSolver solver(cfg);
  if (observer) solver.set_observer(observer);
  MinimizeResult result;
  try {
    solver.start(obj, theta0);
  } catch (const NumericFailure&) {
    result.theta = theta0;
    result.stop = StopReason::numeric_failure;
    result.f = std::nan("");
    result.grad_norm = std::nan("");
    return result;
  }
  for (;;) {
    const ArcsState& st = solver.state();
    if (norm2(st.g) <= cfg.grad_tol) {
      result.stop = StopReason::grad_tol;
      break;
    }
    if (st.k >= cfg.k_max) {
      result.stop = StopReason::max_iter;
      break;
    }
    if (solver.small_step()) {
      result.stop = StopReason::small_step;
      break;
    }
    try {
      result.trace.push_back(solver.step(obj));
    } catch (const NumericFailure&) {
      result.stop = StopReason::numeric_failure;
      break;
    }
  }
  result.theta = solver.state().theta;
  result.f = solver.state().f;
  result.grad_norm = norm2(solver.state().g);
  return result;
}

namespace {

/// Orthonormal basis of R^n whose leading columns are `lead` (assumed
/// orthonormal), followed by the normalized `next` if it is nonzero, then
/// completed from the standard basis.
Matrix complete_basis(const Matrix& lead, const Vector& next, std::size_t n) {
  std::vector<Vector> cols;
  for (std::size_t j = 0; j < lead.cols(); ++j) cols.push_back(lead.column(j));
  auto try_add = [&](Vector v) {
    const double before = norm2(v);
    if (before == 0.0) return;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) axpy(-dot(c, v), c, v);
    const double after = norm2(v);
    if (after <= 1e-8 * before) return;
    for (double& x : v) x /= after;
    cols.push_back(std::move(v));
  };
  try_add(next);
  for (std::size_t i = 0; i < n && cols.size() < n; ++i) {
    Vector e(n, 0.0);
    e[i] = 1.0;
    try_add(std::move(e));
  }
  return Matrix::from_columns(cols);
}

}  // namespace

ModelCheckReport model_decrease_check(const Vector& g, const Sr1Model& model, double mu,
                                      ParallelCurvature curvature) {
  const std::size_t n = g.size();
  if (n > 64) throw std::invalid_argument("model_decrease_check: n > 64");
  const SubproblemSolution sol = solve(g, model.eig, mu, curvature);

  Matrix b = model.compact ? dense_b(*model.compact) : model.delta * Matrix::identity(n);
  const Matrix& upar = model.eig.upar;
  const std::size_t k = model.eig.rank();
  if (curvature == ParallelCurvature::raw)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double p = 0.0;
        for (std::size_t c = 0; c < k; ++c) p += upar(i, c) * upar(j, c);
        b(i, j) -= model.delta * p;
      }

  Vector g_perp = g;
  if (k > 0) axpy(-1.0, multiply(upar, multiply_transpose(upar, g)), g_perp);
  const Matrix u = complete_basis(k > 0 ? upar : Matrix(n, 0), g_perp, n);

  const Vector& s = sol.step;
  const double r3 = norm3(multiply_transpose(u, s));
  const double direct = dot(g, s) + 0.5 * dot(s, multiply(b, s)) + mu / 3.0 * r3 * r3 * r3;
  return {sol.model_value, direct, sol.model_value - direct};
}

ModelCheckReport model_decrease_check(const ArcsState& state, const ArcsConfig& cfg) {
  PairBuffer copy = state.buffer;
  Sr1ModelOptions o;
  o.bounds = cfg.delta_bounds;
  o.shift_scale = cfg.shift_scale;
  const Sr1Model model = build_model(copy, o, state.delta);
  return model_decrease_check(state.g, model, state.mu, cfg.parallel_curvature);
}

}  // namespace arcs
