#include "arcs/bench/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "arcs/datasets.hpp"

namespace arcs::bench {

ConfigError::ConfigError(const std::string& source, int line, int column,
                         const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    const YAML::Mark m = node.Mark();
    throw ConfigError(source_, m.line + 1, m.column + 1, message);
  }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void allow_keys(const YAML::Node& node, const std::string& section,
                  std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + section);
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, "'" + key + "' must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + key + "' has an invalid value '" + node.Scalar() + "'");
    }
  }

  template <class T>
  void get(const YAML::Node& map, const char* key, T& out) const {
    const YAML::Node n = map[key];
    if (!n) return;
    out = scalar<T>(n, key);
  }

  void get_count(const YAML::Node& map, const char* key, std::size_t& out) const {
    const YAML::Node n = map[key];
    if (!n) return;
    const auto v = scalar<long long>(n, key);
    if (v < 0) fail(n, std::string("'") + key + "' must be nonnegative");
    out = static_cast<std::size_t>(v);
  }

  void get_counts(const YAML::Node& map, const char* key, std::vector<std::size_t>& out) const {
    const YAML::Node n = map[key];
    if (!n) return;
    if (!n.IsSequence()) fail(n, std::string("'") + key + "' must be a list");
    out.clear();
    for (const auto& item : n) {
      const auto v = scalar<long long>(item, key);
      if (v <= 0) fail(item, std::string("'") + key + "' entries must be positive");
      out.push_back(static_cast<std::size_t>(v));
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

Activation parse_activation(const Reader& r, const YAML::Node& n) {
  const auto s = r.scalar<std::string>(n, "activation");
  if (s == "relu") return Activation::relu;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  if (s == "identity") return Activation::identity;
  r.fail(n, "'activation' must be relu, sigmoid, tanh or identity, got '" + s + "'");
}

ProblemSpec parse_problem(const Reader& r, const YAML::Node& n) {
  r.require_map(n, "'problem'");
  r.allow_keys(n, "problem",
               {"name", "dim", "condition", "diagonal", "dataset", "data_dir", "iris_file",
                "images_file", "labels_file", "limit", "image_side", "downsample", "hidden",
                "activation", "l2", "standardize", "blobs"});
  ProblemSpec p;
  if (!n["name"]) r.fail(n, "'problem' needs a 'name'");
  p.name = r.scalar<std::string>(n["name"], "name");
  static const std::set<std::string> names{"quadratic", "rosenbrock", "logistic",
                                           "iris_mlp",  "autoencoder", "mlp"};
  if (!names.count(p.name)) r.fail(n["name"], "unknown problem name '" + p.name + "'");
  r.get_count(n, "dim", p.dim);
  r.get(n, "condition", p.condition);
  r.get(n, "diagonal", p.diagonal);
  r.get(n, "dataset", p.dataset);
  if (n["dataset"] && p.dataset != "blobs" && p.dataset != "iris" && p.dataset != "digits")
    r.fail(n["dataset"], "'dataset' must be blobs, iris or digits");
  std::string dir;
  r.get(n, "data_dir", dir);
  p.data_dir = dir;
  r.get(n, "iris_file", p.iris_file);
  r.get(n, "images_file", p.images_file);
  r.get(n, "labels_file", p.labels_file);
  r.get_count(n, "limit", p.limit);
  r.get_count(n, "image_side", p.image_side);
  r.get_count(n, "downsample", p.downsample);
  r.get_counts(n, "hidden", p.hidden);
  if (n["activation"]) p.activation = parse_activation(r, n["activation"]);
  r.get(n, "l2", p.l2);
  r.get(n, "standardize", p.standardize);
  if (const YAML::Node b = n["blobs"]) {
    r.require_map(b, "'blobs'");
    r.allow_keys(b, "blobs", {"classes", "per_class", "dim", "separation", "stddev"});
    r.get_count(b, "classes", p.blobs.classes);
    r.get_count(b, "per_class", p.blobs.per_class);
    r.get_count(b, "dim", p.blobs.dim);
    r.get(b, "separation", p.blobs.separation);
    r.get(b, "stddev", p.blobs.stddev);
  }
  if (p.condition < 1.0) r.fail(n["condition"], "'condition' must be >= 1");
  if (p.l2 < 0.0) r.fail(n["l2"], "'l2' must be nonnegative");
  return p;
}

OptimizerSpec parse_optimizer(const Reader& r, const YAML::Node& n) {
  r.require_map(n, "optimizer");
  if (!n["name"]) r.fail(n, "optimizer needs a 'name'");
  OptimizerSpec o;
  o.name = r.scalar<std::string>(n["name"], "name");
  if (o.is_arcs()) {
    r.allow_keys(n, "optimizer arcs_lsr1",
                 {"name", "mu0", "eta1", "eta2", "gamma1", "gamma2", "accept_eps", "term_eps",
                  "memory", "grad_tol", "delta_min", "delta_max", "shift_scale", "mu_min",
                  "parallel_curvature"});
    ArcsConfig& c = o.arcs;
    r.get(n, "mu0", c.mu0);
    r.get(n, "eta1", c.eta1);
    r.get(n, "eta2", c.eta2);
    r.get(n, "gamma1", c.gamma1);
    r.get(n, "gamma2", c.gamma2);
    r.get(n, "accept_eps", c.accept_eps);
    r.get(n, "term_eps", c.term_eps);
    r.get_count(n, "memory", c.memory);
    r.get(n, "grad_tol", c.grad_tol);
    r.get(n, "delta_min", c.delta_bounds.min);
    r.get(n, "delta_max", c.delta_bounds.max);
    r.get(n, "shift_scale", c.shift_scale);
    r.get(n, "mu_min", c.mu_min);
    if (const YAML::Node pc = n["parallel_curvature"]) {
      const auto s = r.scalar<std::string>(pc, "parallel_curvature");
      if (s == "shifted")
        c.parallel_curvature = ParallelCurvature::shifted;
      else if (s == "raw")
        c.parallel_curvature = ParallelCurvature::raw;
      else
        r.fail(pc, "'parallel_curvature' must be shifted or raw");
    }
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      r.fail(n, e.what());
    }
    return o;
  }
  BaselineMethod method;
  try {
    method = baseline_method_from_string(o.name);
  } catch (const std::invalid_argument&) {
    r.fail(n["name"], "unknown optimizer name '" + o.name + "'");
  }
  o.name = std::string(to_string(method));
  o.baseline = BaselineConfig::defaults(method);
  BaselineConfig& c = o.baseline;
  switch (method) {
    case BaselineMethod::sgd_momentum:
      r.allow_keys(n, "optimizer sgd_momentum", {"name", "learning_rate", "momentum"});
      break;
    case BaselineMethod::adagrad:
      r.allow_keys(n, "optimizer adagrad", {"name", "learning_rate", "eps"});
      break;
    case BaselineMethod::rmsprop:
      r.allow_keys(n, "optimizer rmsprop", {"name", "learning_rate", "eps", "alpha"});
      break;
    case BaselineMethod::adam:
      r.allow_keys(n, "optimizer adam", {"name", "learning_rate", "eps", "beta1", "beta2"});
      break;
    case BaselineMethod::lbfgs:
      r.allow_keys(n, "optimizer lbfgs", {"name", "learning_rate", "memory", "tol"});
      break;
  }
  r.get(n, "learning_rate", c.learning_rate);
  r.get(n, "momentum", c.momentum);
  r.get(n, "eps", c.eps_perturbation);
  r.get(n, "alpha", c.alpha_rms);
  r.get(n, "beta1", c.beta1);
  r.get(n, "beta2", c.beta2);
  r.get_count(n, "memory", c.lbfgs_memory);
  r.get(n, "tol", c.lbfgs_tol);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(n, e.what());
  }
  return o;
}

BatchSchedule parse_schedule(const Reader& r, const YAML::Node& n) {
  r.require_map(n, "'schedule'");
  r.allow_keys(n, "schedule",
               {"initial_batch", "max_batch", "growth_factor", "full_eval_period",
                "stall_tolerance", "max_iters_per_batch"});
  BatchSchedule s;
  r.get_count(n, "initial_batch", s.initial_batch);
  r.get_count(n, "max_batch", s.max_batch);
  r.get(n, "growth_factor", s.growth_factor);
  r.get_count(n, "full_eval_period", s.full_eval_period);
  r.get(n, "stall_tolerance", s.stall_tolerance);
  r.get_count(n, "max_iters_per_batch", s.max_iters_per_batch);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(n, e.what());
  }
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source_name) {
  const Reader r(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name, e.mark.line + 1, e.mark.column + 1, e.msg);
  }
  if (!root.IsMap()) throw ConfigError(source_name, 1, 1, "configuration must be a mapping");
  r.allow_keys(root, "configuration",
               {"seed", "out_dir", "problem", "optimizer", "optimizers", "schedule", "epochs",
                "iterations", "sweep", "trace"});
  RunConfig cfg;
  cfg.source = source_name;
  r.get(root, "seed", cfg.seed);
  std::string out_dir = cfg.out_dir.string();
  r.get(root, "out_dir", out_dir);
  cfg.out_dir = out_dir;
  if (!root["problem"]) throw ConfigError(source_name, 1, 1, "missing 'problem' section");
  cfg.problem = parse_problem(r, root["problem"]);

  if (!root["optimizer"] && !root["optimizers"])
    throw ConfigError(source_name, 1, 1, "missing 'optimizer' or 'optimizers' section");
  if (root["optimizer"] && root["optimizers"])
    r.fail(root["optimizers"], "give either 'optimizer' or 'optimizers', not both");
  if (const YAML::Node o = root["optimizer"]) cfg.optimizers.push_back(parse_optimizer(r, o));
  if (const YAML::Node list = root["optimizers"]) {
    if (!list.IsSequence() || list.size() == 0)
      r.fail(list, "'optimizers' must be a nonempty list");
    for (const auto& o : list) cfg.optimizers.push_back(parse_optimizer(r, o));
  }

  if (const YAML::Node s = root["schedule"]) cfg.schedule = parse_schedule(r, s);
  r.get_count(root, "epochs", cfg.epochs);
  r.get_count(root, "iterations", cfg.iterations);
  if (cfg.iterations == 0) r.fail(root["iterations"], "'iterations' must be positive");

  if (const YAML::Node s = root["sweep"]) {
    r.require_map(s, "'sweep'");
    r.allow_keys(s, "sweep", {"memory", "max_iters", "batch"});
    r.get_counts(s, "memory", cfg.sweep.memory);
    r.get_counts(s, "max_iters", cfg.sweep.max_iters);
    r.get_counts(s, "batch", cfg.sweep.batch);
  }
  if (const YAML::Node t = root["trace"]) {
    r.require_map(t, "'trace'");
    r.allow_keys(t, "trace", {"wall_clock"});
    r.get(t, "wall_clock", cfg.wall_clock);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, 0, "cannot open configuration file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

namespace {

std::filesystem::path resolve(const ProblemSpec& spec, const std::string& file) {
  const std::filesystem::path p(file);
  if (p.is_absolute()) return p;
  if (const char* env = std::getenv("ARCS_DATA_DIR"); env && *env)
    return std::filesystem::path(env) / p;
  if (!spec.data_dir.empty()) return spec.data_dir / p;
  return std::filesystem::path("data") / p;
}

std::shared_ptr<Dataset> load_dataset(const ProblemSpec& spec, const std::string& kind,
                                      std::uint64_t seed) {
  std::shared_ptr<Dataset> ds;
  if (kind == "iris") {
    ds = std::make_shared<Dataset>(load_iris(resolve(spec, spec.iris_file), seed));
  } else if (kind == "digits") {
    ds = std::make_shared<Dataset>(load_idx(resolve(spec, spec.images_file),
                                            resolve(spec, spec.labels_file), spec.limit));
    if (spec.downsample > 1) downsample_images(*ds, spec.image_side, spec.downsample);
    stratified_split(*ds, 0.2, seed);
  } else {
    BlobSpec b = spec.blobs;
    b.seed = seed;
    ds = std::make_shared<Dataset>(synth_blobs(b));
  }
  if (spec.standardize && kind != "digits") standardize(*ds);
  return ds;
}

}  // namespace

Problem build_problem(const ProblemSpec& spec, std::uint64_t seed) {
  Problem p;
  p.name = spec.name;
  if (spec.name == "quadratic") {
    const std::size_t n = spec.dim == 0 ? 50 : spec.dim;
    std::shared_ptr<Quadratic> q;
    if (spec.diagonal) {
      Vector d(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = n == 1 ? 1.0
                      : std::pow(spec.condition, static_cast<double>(i) / static_cast<double>(n - 1));
        b[i] = 1.0;
      }
      q = std::make_shared<Quadratic>(Quadratic::diagonal(std::move(d), std::move(b)));
    } else {
      q = std::make_shared<Quadratic>(Quadratic::random_dense(n, spec.condition, seed));
    }
    p.objective = q;
    p.theta0.assign(n, 0.0);
  } else if (spec.name == "rosenbrock") {
    const std::size_t n = spec.dim == 0 ? 2 : spec.dim;
    p.objective = std::make_shared<Rosenbrock>(n);
    p.theta0.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.theta0[i] = i % 2 == 0 ? -1.2 : 1.0;
  } else if (spec.name == "logistic") {
    auto ds = load_dataset(spec, spec.dataset.empty() ? "blobs" : spec.dataset, seed);
    auto obj = std::make_shared<LogisticRegression>(ds, spec.l2);
    p.theta0.assign(obj->dim(), 0.0);
    p.objective = obj;
    p.supervised = obj;
  } else {
    MlpSpec m;
    std::string kind = spec.dataset;
    if (spec.name == "iris_mlp") {
      m = iris_mlp_spec(seed);
      kind = "iris";
    } else if (spec.name == "autoencoder") {
      kind = "digits";
    } else if (kind.empty()) {
      kind = "blobs";
    }
    auto ds = load_dataset(spec, kind, seed);
    if (spec.name == "autoencoder") {
      make_autoencoder(*ds);
      const std::size_t w = ds->input_dim();
      m.widths = {w};
      const std::vector<std::size_t> hidden = spec.hidden.empty() ? std::vector<std::size_t>{32}
                                                                  : spec.hidden;
      m.widths.insert(m.widths.end(), hidden.begin(), hidden.end());
      m.widths.push_back(w);
      m.loss = Loss::mse;
      m.output = Activation::sigmoid;
      m.hidden = spec.activation;
      m.init_seed = seed;
    } else if (spec.name == "mlp") {
      m.widths = {ds->input_dim()};
      const std::vector<std::size_t> hidden = spec.hidden.empty() ? std::vector<std::size_t>{16}
                                                                  : spec.hidden;
      m.widths.insert(m.widths.end(), hidden.begin(), hidden.end());
      m.widths.push_back(ds->num_classes);
      m.hidden = spec.activation;
      m.init_seed = seed;
    }
    auto obj = std::make_shared<Mlp>(m, ds);
    p.theta0 = obj->initial_parameters();
    p.objective = obj;
    p.supervised = obj;
  }
  return p;
}

}  // namespace arcs::bench
