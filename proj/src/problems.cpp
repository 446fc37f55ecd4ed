#include "arcs/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace arcs {

// ---------------------------------------------------------------- Quadratic

Quadratic Quadratic::dense(Matrix a, Vector b, double c) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw std::invalid_argument("Quadratic: A must be n x n with n = |b|");
  Quadratic q;
  q.dense_ = std::move(a);
  q.b_ = std::move(b);
  q.c_ = c;
  return q;
}

Quadratic Quadratic::diagonal(Vector diag, Vector b, double c) {
  if (diag.size() != b.size()) throw std::invalid_argument("Quadratic: |diag| must equal |b|");
  Quadratic q;
  q.diag_ = std::move(diag);
  q.b_ = std::move(b);
  q.c_ = c;
  return q;
}

Quadratic Quadratic::centered(const Vector& center) {
  return diagonal(Vector(center.size(), 1.0), center, 0.5 * dot(center, center));
}

Quadratic Quadratic::random_dense(std::size_t n, double condition, std::uint64_t seed) {
  if (n == 0 || !(condition >= 1.0))
    throw std::invalid_argument("random_dense: need n > 0 and condition >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (double& x : g.row(i)) x = normal(rng);
  const Matrix q = qr_thin(g).q;
  Matrix scaled = q;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = n == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(n - 1);
    const double lambda = std::pow(condition, t);
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= lambda;
  }
  Matrix a = scaled * q.transpose();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  Vector b(n);
  for (double& x : b) x = normal(rng);
  return dense(std::move(a), std::move(b));
}

Vector Quadratic::apply(const Vector& x) const {
  if (x.size() != b_.size()) throw std::invalid_argument("Quadratic: length mismatch");
  if (dense_) return multiply(*dense_, x);
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = diag_[i] * x[i];
  return y;
}

double Quadratic::value(const Vector& x) const {
  return 0.5 * dot(x, apply(x)) - dot(b_, x) + c_;
}

Vector Quadratic::gradient(const Vector& x) const {
  Vector g = apply(x);
  axpy(-1.0, b_, g);
  return g;
}

double Quadratic::value_and_gradient(const Vector& x, Vector& grad) const {
  grad = apply(x);
  const double f = 0.5 * dot(x, grad) - dot(b_, x) + c_;
  axpy(-1.0, b_, grad);
  return f;
}

Matrix Quadratic::hessian() const {
  if (dense_) return *dense_;
  if (diag_.size() > 512) throw std::invalid_argument("Quadratic::hessian: n too large");
  Matrix a(diag_.size(), diag_.size());
  for (std::size_t i = 0; i < diag_.size(); ++i) a(i, i) = diag_[i];
  return a;
}

Vector Quadratic::minimizer() const {
  if (!dense_) {
    Vector x(b_.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = b_[i] / diag_[i];
    return x;
  }
  return solve_small(*dense_, Matrix::from_columns(std::span(&b_, 1))).x.column(0);
}

// --------------------------------------------------------------- Rosenbrock

Rosenbrock::Rosenbrock(std::size_t n) : n_(n) {
  if (n < 2) throw std::invalid_argument("Rosenbrock: n must be >= 2");
}

double Rosenbrock::value(const Vector& x) const {
  if (x.size() != n_) throw std::invalid_argument("Rosenbrock: length mismatch");
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < n_; ++i) {
    const double t1 = x[i + 1] - x[i] * x[i];
    const double t2 = 1.0 - x[i];
    f += 100.0 * t1 * t1 + t2 * t2;
  }
  return f;
}

Vector Rosenbrock::gradient(const Vector& x) const {
  Vector g;
  value_and_gradient(x, g);
  return g;
}

double Rosenbrock::value_and_gradient(const Vector& x, Vector& grad) const {
  if (x.size() != n_) throw std::invalid_argument("Rosenbrock: length mismatch");
  grad.assign(n_, 0.0);
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < n_; ++i) {
    const double t1 = x[i + 1] - x[i] * x[i];
    const double t2 = 1.0 - x[i];
    f += 100.0 * t1 * t1 + t2 * t2;
    grad[i] += -400.0 * x[i] * t1 - 2.0 * t2;
    grad[i + 1] += 200.0 * t1;
  }
  return f;
}

// ------------------------------------------------------- LogisticRegression

namespace {

std::vector<std::size_t> rows_of(const std::vector<std::size_t>& split,
                                 std::span<const std::size_t> positions) {
  std::vector<std::size_t> rows(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] >= split.size()) throw std::out_of_range("batch position out of range");
    rows[i] = split[positions[i]];
  }
  return rows;
}

/// log-sum-exp of z, and softmax(z) written into p.
double log_softmax(const Vector& z, Vector& p) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  p.resize(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) sum += (p[c] = std::exp(z[c] - zmax));
  for (double& v : p) v /= sum;
  return zmax + std::log(sum);
}

}  // namespace

LogisticRegression::LogisticRegression(std::shared_ptr<const Dataset> data, double l2)
    : data_(std::move(data)), l2_(l2) {
  if (!data_ || data_->labels.empty() || data_->num_classes < 2)
    throw std::invalid_argument("LogisticRegression: need a labelled dataset with >= 2 classes");
  if (data_->train.empty()) throw std::invalid_argument("LogisticRegression: empty training split");
  if (l2 < 0.0) throw std::invalid_argument("LogisticRegression: l2 must be >= 0");
}

std::size_t LogisticRegression::dim() const {
  return data_->num_classes * (data_->input_dim() + 1);
}

double LogisticRegression::evaluate(const Vector& theta, std::span<const std::size_t> rows,
                                    Vector* grad) const {
  if (theta.size() != dim()) throw std::invalid_argument("LogisticRegression: length mismatch");
  const std::size_t classes = data_->num_classes;
  const std::size_t d = data_->input_dim();
  if (grad) grad->assign(theta.size(), 0.0);
  const double inv = 1.0 / static_cast<double>(rows.size());
  Vector z(classes), p;
  double loss = 0.0;
  for (std::size_t row : rows) {
    const Vector& x = data_->inputs[row];
    for (std::size_t c = 0; c < classes; ++c) {
      const double* w = theta.data() + c * (d + 1);
      double s = w[d];
      for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
      z[c] = s;
    }
    const int label = data_->labels[row];
    loss += (log_softmax(z, p) - z[label]) * inv;
    if (!grad) continue;
    for (std::size_t c = 0; c < classes; ++c) {
      const double dz = (p[c] - (static_cast<int>(c) == label ? 1.0 : 0.0)) * inv;
      double* gw = grad->data() + c * (d + 1);
      for (std::size_t j = 0; j < d; ++j) gw[j] += dz * x[j];
      gw[d] += dz;
    }
  }
  loss += 0.5 * l2_ * dot(theta, theta);
  if (grad) axpy(l2_, theta, *grad);
  return loss;
}

double LogisticRegression::value(const Vector& theta) const {
  return evaluate(theta, data_->train, nullptr);
}

Vector LogisticRegression::gradient(const Vector& theta) const {
  Vector g;
  evaluate(theta, data_->train, &g);
  return g;
}

double LogisticRegression::value_and_gradient(const Vector& theta, Vector& grad) const {
  return evaluate(theta, data_->train, &grad);
}

double LogisticRegression::value_batch(const Vector& theta,
                                       std::span<const std::size_t> batch) const {
  return evaluate(theta, rows_of(data_->train, batch), nullptr);
}

double LogisticRegression::value_and_gradient_batch(const Vector& theta,
                                                    std::span<const std::size_t> batch,
                                                    Vector& grad) const {
  return evaluate(theta, rows_of(data_->train, batch), &grad);
}

double LogisticRegression::test_value(const Vector& theta) const {
  if (data_->test.empty()) return std::nan("");
  return evaluate(theta, data_->test, nullptr);
}

std::size_t LogisticRegression::predict(const Vector& theta, const Vector& x) const {
  const std::size_t d = data_->input_dim();
  std::size_t best = 0;
  double best_score = -INFINITY;
  for (std::size_t c = 0; c < data_->num_classes; ++c) {
    const double* w = theta.data() + c * (d + 1);
    double s = w[d];
    for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

std::optional<double> LogisticRegression::test_accuracy(const Vector& theta) const {
  if (data_->test.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (std::size_t row : data_->test)
    hits += predict(theta, data_->inputs[row]) == static_cast<std::size_t>(data_->labels[row]);
  return static_cast<double>(hits) / static_cast<double>(data_->test.size());
}

double LogisticRegression::train_accuracy(const Vector& theta) const {
  std::size_t hits = 0;
  for (std::size_t row : data_->train)
    hits += predict(theta, data_->inputs[row]) == static_cast<std::size_t>(data_->labels[row]);
  return static_cast<double>(hits) / static_cast<double>(data_->train.size());
}

// ---------------------------------------------------------------------- Mlp

std::size_t MlpSpec::parameter_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) count += (widths[l] + 1) * widths[l + 1];
  return count;
}

MlpSpec iris_mlp_spec(std::uint64_t init_seed) {
  MlpSpec spec;
  spec.widths = {4, 50, 50, 3};
  spec.hidden = Activation::relu;
  spec.loss = Loss::softmax_cross_entropy;
  spec.init_seed = init_seed;
  if (spec.parameter_count() != 2953) throw std::logic_error("IRIS network must have 2953 parameters");
  return spec;
}

namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::tanh: return std::tanh(z);
  }
  return z;
}

/// Derivative expressed through the activation output.
double activate_prime(Activation a, double out) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::relu: return out > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return out * (1.0 - out);
    case Activation::tanh: return 1.0 - out * out;
  }
  return 1.0;
}

}  // namespace

Mlp::Mlp(MlpSpec spec, std::shared_ptr<const Dataset> data)
    : spec_(std::move(spec)), data_(std::move(data)) {
  if (spec_.widths.size() < 2) throw std::invalid_argument("Mlp: need at least input and output widths");
  for (std::size_t w : spec_.widths)
    if (w == 0) throw std::invalid_argument("Mlp: zero layer width");
  if (!data_) throw std::invalid_argument("Mlp: no dataset");
  if (data_->input_dim() != spec_.widths.front())
    throw std::invalid_argument("Mlp: input width does not match dataset features");
  if (data_->train.empty()) throw std::invalid_argument("Mlp: empty training split");
  if (spec_.loss == Loss::softmax_cross_entropy) {
    if (data_->labels.empty() || data_->num_classes != spec_.widths.back())
      throw std::invalid_argument("Mlp: output width must equal the number of classes");
  } else {
    if (data_->targets.empty() || data_->targets.front().size() != spec_.widths.back())
      throw std::invalid_argument("Mlp: output width must equal the target width");
  }
}

Vector Mlp::initial_parameters() const {
  std::mt19937_64 rng(spec_.init_seed);
  std::uniform_real_distribution<double> u(-spec_.init_scale, spec_.init_scale);
  Vector theta(dim());
  for (double& x : theta) x = u(rng);
  return theta;
}

double Mlp::sample_loss(const Vector& theta, std::size_t row, Vector* grad,
                        std::vector<Vector>& acts) const {
  const auto& w = spec_.widths;
  const std::size_t layers = w.size() - 1;
  const bool ce = spec_.loss == Loss::softmax_cross_entropy;
  acts.resize(w.size());
  acts[0] = data_->inputs[row];
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = w[l], out = w[l + 1];
    const double* weights = theta.data() + offset;
    const double* bias = weights + in * out;
    const Activation act = l + 1 == layers ? (ce ? Activation::identity : spec_.output) : spec_.hidden;
    Vector& a = acts[l + 1];
    a.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double z = bias[o];
      const double* wr = weights + o * in;
      for (std::size_t i = 0; i < in; ++i) z += wr[i] * acts[l][i];
      a[o] = activate(act, z);
    }
    offset += (in + 1) * out;
  }

  const Vector& top = acts.back();
  Vector delta(top.size());
  double loss = 0.0;
  if (ce) {
    Vector p;
    const int label = data_->labels[row];
    loss = log_softmax(top, p) - top[label];
    for (std::size_t c = 0; c < p.size(); ++c) delta[c] = p[c] - (static_cast<int>(c) == label);
  } else {
    const Vector& t = data_->targets[row];
    const double inv = 1.0 / static_cast<double>(t.size());
    for (std::size_t c = 0; c < t.size(); ++c) {
      const double r = top[c] - t[c];
      loss += r * r * inv;
      delta[c] = 2.0 * r * inv * activate_prime(spec_.output, top[c]);
    }
  }
  if (!grad) return loss;

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = w[l], out = w[l + 1];
    offset -= (in + 1) * out;
    const double* weights = theta.data() + offset;
    double* gw = grad->data() + offset;
    double* gb = gw + in * out;
    const Vector& x = acts[l];
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      double* gr = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) gr[i] += d * x[i];
      gb[o] += d;
    }
    if (l == 0) break;
    Vector prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* wr = weights + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += wr[i] * d;
    }
    for (std::size_t i = 0; i < in; ++i) prev[i] *= activate_prime(spec_.hidden, x[i]);
    delta = std::move(prev);
  }
  return loss;
}

double Mlp::evaluate(const Vector& theta, std::span<const std::size_t> rows, Vector* grad) const {
  if (theta.size() != dim()) throw std::invalid_argument("Mlp: parameter length mismatch");
  if (rows.empty()) throw std::invalid_argument("Mlp: empty sample set");
  if (grad) grad->assign(theta.size(), 0.0);
  std::vector<Vector> acts;
  double loss = 0.0;
  for (std::size_t row : rows) loss += sample_loss(theta, row, grad, acts);
  const double inv = 1.0 / static_cast<double>(rows.size());
  if (grad)
    for (double& g : *grad) g *= inv;
  return loss * inv;
}

double Mlp::value(const Vector& theta) const { return evaluate(theta, data_->train, nullptr); }

Vector Mlp::gradient(const Vector& theta) const {
  Vector g;
  evaluate(theta, data_->train, &g);
  return g;
}

double Mlp::value_and_gradient(const Vector& theta, Vector& grad) const {
  return evaluate(theta, data_->train, &grad);
}

double Mlp::value_batch(const Vector& theta, std::span<const std::size_t> batch) const {
  return evaluate(theta, rows_of(data_->train, batch), nullptr);
}

double Mlp::value_and_gradient_batch(const Vector& theta, std::span<const std::size_t> batch,
                                     Vector& grad) const {
  return evaluate(theta, rows_of(data_->train, batch), &grad);
}

double Mlp::test_value(const Vector& theta) const {
  if (data_->test.empty()) return std::nan("");
  return evaluate(theta, data_->test, nullptr);
}

Vector Mlp::forward(const Vector& theta, const Vector& x) const {
  if (x.size() != spec_.widths.front()) throw std::invalid_argument("Mlp::forward: input width");
  const auto& w = spec_.widths;
  const std::size_t layers = w.size() - 1;
  const bool ce = spec_.loss == Loss::softmax_cross_entropy;
  Vector a = x;
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = w[l], out = w[l + 1];
    const double* weights = theta.data() + offset;
    const double* bias = weights + in * out;
    const Activation act = l + 1 == layers ? (ce ? Activation::identity : spec_.output) : spec_.hidden;
    Vector next(out);
    for (std::size_t o = 0; o < out; ++o) {
      double z = bias[o];
      for (std::size_t i = 0; i < in; ++i) z += weights[o * in + i] * a[i];
      next[o] = activate(act, z);
    }
    a = std::move(next);
    offset += (in + 1) * out;
  }
  return a;
}

std::optional<double> Mlp::test_accuracy(const Vector& theta) const {
  if (spec_.loss != Loss::softmax_cross_entropy || data_->test.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (std::size_t row : data_->test) {
    const Vector out = forward(theta, data_->inputs[row]);
    const auto best = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
    hits += best == static_cast<std::size_t>(data_->labels[row]);
  }
  return static_cast<double>(hits) / static_cast<double>(data_->test.size());
}

}  // namespace arcs
