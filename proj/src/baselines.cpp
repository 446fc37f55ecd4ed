#include "arcs/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "arcs/errors.hpp"

namespace arcs {

std::string_view to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::sgd_momentum: return "sgd_momentum";
    case BaselineMethod::adagrad: return "adagrad";
    case BaselineMethod::rmsprop: return "rmsprop";
    case BaselineMethod::adam: return "adam";
    case BaselineMethod::lbfgs: return "lbfgs";
  }
  return "unknown";
}

BaselineMethod baseline_method_from_string(std::string_view name) {
  for (auto m : {BaselineMethod::sgd_momentum, BaselineMethod::adagrad, BaselineMethod::rmsprop,
                 BaselineMethod::adam, BaselineMethod::lbfgs})
    if (to_string(m) == name) return m;
  if (name == "sgd") return BaselineMethod::sgd_momentum;
  throw std::invalid_argument("unknown baseline method '" + std::string(name) + "'");
}

BaselineConfig BaselineConfig::defaults(BaselineMethod method) {
  BaselineConfig c;
  c.method = method;
  switch (method) {
    case BaselineMethod::sgd_momentum:
      c.learning_rate = 1e-1;
      c.momentum = 0.9;
      break;
    case BaselineMethod::adagrad:
      c.learning_rate = 1e-2;
      c.eps_perturbation = 1e-10;
      break;
    case BaselineMethod::rmsprop:
      c.learning_rate = 1e-2;
      c.eps_perturbation = 1e-8;
      c.alpha_rms = 0.99;
      break;
    case BaselineMethod::adam:
      c.learning_rate = 1e-3;
      c.eps_perturbation = 1e-6;
      c.beta1 = 0.9;
      c.beta2 = 0.999;
      break;
    case BaselineMethod::lbfgs:
      c.learning_rate = 1.0;
      c.lbfgs_tol = 1e-9;
      c.lbfgs_memory = 10;
      break;
  }
  return c;
}

void BaselineConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("BaselineConfig: learning_rate must be > 0");
  switch (method) {
    case BaselineMethod::sgd_momentum:
      if (!(momentum >= 0.0 && momentum < 1.0))
        throw std::invalid_argument("BaselineConfig: momentum must be in [0, 1)");
      break;
    case BaselineMethod::adagrad:
      if (!(eps_perturbation > 0.0)) throw std::invalid_argument("BaselineConfig: eps must be > 0");
      break;
    case BaselineMethod::rmsprop:
      if (!(eps_perturbation > 0.0)) throw std::invalid_argument("BaselineConfig: eps must be > 0");
      if (!(alpha_rms > 0.0 && alpha_rms < 1.0))
        throw std::invalid_argument("BaselineConfig: alpha must be in (0, 1)");
      break;
    case BaselineMethod::adam:
      if (!(eps_perturbation > 0.0)) throw std::invalid_argument("BaselineConfig: eps must be > 0");
      if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0))
        throw std::invalid_argument("BaselineConfig: betas must be in (0, 1)");
      break;
    case BaselineMethod::lbfgs:
      if (lbfgs_memory == 0) throw std::invalid_argument("BaselineConfig: lbfgs_memory must be > 0");
      if (!(lbfgs_tol > 0.0)) throw std::invalid_argument("BaselineConfig: lbfgs_tol must be > 0");
      break;
  }
}

void baseline_step(const BaselineConfig& cfg, FirstOrderState& st, const Vector& g, Vector& theta) {
  if (g.size() != theta.size()) throw std::invalid_argument("baseline_step: length mismatch");
  if (!all_finite(g)) throw NumericFailure("baseline_step: non-finite gradient");
  const std::size_t n = theta.size();
  const double lr = cfg.learning_rate;
  switch (cfg.method) {
    case BaselineMethod::sgd_momentum:
      st.velocity.resize(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        st.velocity[i] = cfg.momentum * st.velocity[i] - lr * g[i];
        theta[i] += st.velocity[i];
      }
      break;
    case BaselineMethod::adagrad:
      st.accumulator.resize(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        st.accumulator[i] += g[i] * g[i];
        theta[i] -= lr * g[i] / (std::sqrt(st.accumulator[i]) + cfg.eps_perturbation);
      }
      break;
    case BaselineMethod::rmsprop:
      st.accumulator.resize(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        st.accumulator[i] = cfg.alpha_rms * st.accumulator[i] + (1.0 - cfg.alpha_rms) * g[i] * g[i];
        theta[i] -= lr * g[i] / (std::sqrt(st.accumulator[i]) + cfg.eps_perturbation);
      }
      break;
    case BaselineMethod::adam: {
      st.m1.resize(n, 0.0);
      st.m2.resize(n, 0.0);
      ++st.t;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
      for (std::size_t i = 0; i < n; ++i) {
        st.m1[i] = cfg.beta1 * st.m1[i] + (1.0 - cfg.beta1) * g[i];
        st.m2[i] = cfg.beta2 * st.m2[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        theta[i] -= lr * (st.m1[i] / c1) / (std::sqrt(st.m2[i] / c2) + cfg.eps_perturbation);
      }
      break;
    }
    case BaselineMethod::lbfgs:
      throw std::invalid_argument("baseline_step: lbfgs is not a first-order update");
  }
}

Lbfgs::Lbfgs(BaselineConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.method != BaselineMethod::lbfgs) throw std::invalid_argument("Lbfgs: method must be lbfgs");
  cfg_.validate();
}

void Lbfgs::reset_point(const Objective& obj, const Vector& theta) {
  if (!all_finite(theta)) throw std::invalid_argument("Lbfgs: non-finite starting point");
  theta_ = theta;
  f_ = obj.value_and_gradient(theta_, g_);
  stamp_ = obj.sample_stamp();
  if (!std::isfinite(f_) || !all_finite(g_))
    throw NumericFailure("Lbfgs: non-finite objective at starting point");
}

Vector Lbfgs::direction(const Vector& g) const {
  Vector q = g;
  std::vector<double> alpha(pairs_.size());
  for (std::size_t i = pairs_.size(); i-- > 0;) {
    const auto& p = pairs_[i];
    alpha[i] = dot(p.s, q) / dot(p.y, p.s);
    axpy(-alpha[i], p.y, q);
  }
  if (!pairs_.empty()) {
    const auto& last = pairs_.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& x : q) x *= gamma;
  }
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& p = pairs_[i];
    const double beta = dot(p.y, q) / dot(p.y, p.s);
    axpy(alpha[i] - beta, p.s, q);
  }
  return q;
}

IterRecord Lbfgs::step(const Objective& obj) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (obj.sample_stamp() != stamp_) throw std::logic_error("Lbfgs: gradient pair would mix sample sets");
  IterRecord rec;
  rec.k = k_++;
  rec.rho = std::nan("");
  rec.mu = std::nan("");

  Vector d = direction(g_);
  for (double& x : d) x = -x;
  double slope = dot(g_, d);
  if (!(slope < 0.0)) {
    // Stale curvature; fall back to steepest descent.
    pairs_.clear();
    d = g_;
    for (double& x : d) x = -x;
    slope = -dot(g_, g_);
  }

  double t = cfg_.learning_rate;
  if (pairs_.empty()) t = std::min(t, 1.0 / std::max(1.0, norm2(g_)));
  Vector trial(theta_.size());
  Vector g_trial;
  double f_trial = 0.0;
  bool found = false;
  for (int halving = 0; halving <= 50; ++halving) {
    trial = theta_;
    axpy(t, d, trial);
    f_trial = obj.value_and_gradient(trial, g_trial);
    if (!std::isfinite(f_trial) || !all_finite(g_trial)) {
      t *= 0.5;
      continue;
    }
    const double slope_trial = dot(g_trial, d);
    const bool armijo = f_trial <= f_ + 1e-4 * t * slope;
    const bool approx_wolfe = f_trial <= f_ + 1e-10 * std::abs(f_) &&
                              slope_trial >= 0.9 * slope && slope_trial <= (2e-4 - 1.0) * slope;
    if (armijo || approx_wolfe) {
      found = true;
      break;
    }
    t *= 0.5;
  }

  if (!found) {
    pairs_.clear();
  } else {
    Vector s = trial;
    axpy(-1.0, theta_, s);
    Vector y = g_trial;
    axpy(-1.0, g_, y);
    if (dot(s, y) > 1e-10 * norm2(s) * norm2(y)) {
      if (pairs_.size() >= cfg_.lbfgs_memory) pairs_.pop_front();
      pairs_.push_back({s, y});
      rec.pair_accepted = true;
    }
    rec.step_norm = norm2(s);
    rec.accepted = true;
    theta_ = std::move(trial);
    f_ = f_trial;
    g_ = std::move(g_trial);
  }
  rec.f_value = f_;
  rec.grad_norm = norm2(g_);
  rec.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
  return rec;
}

MinimizeResult lbfgs_minimize(const Objective& obj, const Vector& theta0, const BaselineConfig& cfg) {
  Lbfgs solver(cfg);
  MinimizeResult result;
  try {
    solver.reset_point(obj, theta0);
  } catch (const NumericFailure&) {
    result.theta = theta0;
    result.stop = StopReason::numeric_failure;
    return result;
  }
  for (std::size_t k = 0;; ++k) {
    if (norm2(solver.g()) <= cfg.lbfgs_tol) {
      result.stop = StopReason::grad_tol;
      break;
    }
    if (k >= cfg.max_iter) {
      result.stop = StopReason::max_iter;
      break;
    }
    result.trace.push_back(solver.step(obj));
  }
  result.theta = solver.theta();
  result.f = solver.f();
  result.grad_norm = norm2(solver.g());
  return result;
}

MinimizeResult first_order_minimize(const Objective& obj, const Vector& theta0,
                                    const BaselineConfig& cfg) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  MinimizeResult result;
  result.theta = theta0;
  FirstOrderState st;
  Vector g;
  double f = obj.value_and_gradient(result.theta, g);
  for (std::size_t k = 0; k < cfg.max_iter; ++k) {
    const auto t0 = clock::now();
    Vector before = result.theta;
    try {
      baseline_step(cfg, st, g, result.theta);
    } catch (const NumericFailure&) {
      result.stop = StopReason::numeric_failure;
      break;
    }
    f = obj.value_and_gradient(result.theta, g);
    IterRecord rec;
    rec.k = k;
    rec.f_value = f;
    rec.grad_norm = norm2(g);
    rec.rho = std::nan("");
    rec.mu = std::nan("");
    axpy(-1.0, result.theta, before);
    rec.step_norm = norm2(before);
    rec.accepted = true;
    rec.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
    result.trace.push_back(rec);
    if (!std::isfinite(f)) {
      result.stop = StopReason::numeric_failure;
      break;
    }
  }
  result.f = f;
  result.grad_norm = norm2(g);
  return result;
}

}  // namespace arcs
