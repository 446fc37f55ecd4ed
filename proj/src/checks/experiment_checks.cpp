#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <regex>
#include <sstream>

#include "arcs/bench/commands.hpp"
#include "arcs/datasets.hpp"
#include "arcs/problems.hpp"
#include "arcs/stochastic.hpp"
#include "arcs/trace.hpp"
#include "checks_internal.hpp"
#include "oracle.hpp"

namespace arcs::checks {

namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

std::size_t first_epoch_reaching(const StochasticResult& r, double accuracy) {
  for (const auto& e : r.epochs)
    if (e.epoch > 0 && e.accuracy && *e.accuracy >= accuracy) return e.epoch;
  return kNever;
}

std::string epochs_text(std::size_t e) { return e == kNever ? "never" : std::to_string(e); }

/// f_i(theta) = c for every sample: the full loss never improves.
class ConstantObjective final : public Objective {
 public:
  ConstantObjective(std::size_t n, std::size_t samples) : n_(n), samples_(samples) {}
  std::size_t dim() const override { return n_; }
  double value(const Vector&) const override { return 1.0; }
  Vector gradient(const Vector&) const override { return Vector(n_, 0.0); }
  std::size_t dataset_size() const override { return samples_; }
  double value_batch(const Vector&, std::span<const std::size_t>) const override { return 1.0; }
  double value_and_gradient_batch(const Vector&, std::span<const std::size_t>,
                                  Vector& grad) const override {
    grad.assign(n_, 0.0);
    return 1.0;
  }

 private:
  std::size_t n_, samples_;
};

/// f_i(theta) = -w_i^T theta with w_i = (1 + i/N, 1, ..., 1): unbounded
/// below, so every J-periodic check sees a large decrease.
class LinearObjective final : public Objective {
 public:
  LinearObjective(std::size_t n, std::size_t samples) : n_(n), samples_(samples) {}
  std::size_t dim() const override { return n_; }
  double value(const Vector& theta) const override {
    std::vector<std::size_t> all(samples_);
    std::iota(all.begin(), all.end(), 0);
    return value_batch(theta, all);
  }
  Vector gradient(const Vector& theta) const override {
    Vector g;
    std::vector<std::size_t> all(samples_);
    std::iota(all.begin(), all.end(), 0);
    value_and_gradient_batch(theta, all, g);
    return g;
  }
  std::size_t dataset_size() const override { return samples_; }
  double value_batch(const Vector& theta, std::span<const std::size_t> batch) const override {
    Vector g;
    return value_and_gradient_batch(theta, batch, g);
  }
  double value_and_gradient_batch(const Vector& theta, std::span<const std::size_t> batch,
                                  Vector& grad) const override {
    double w0 = 0.0;
    for (std::size_t i : batch) w0 += 1.0 + static_cast<double>(i) / static_cast<double>(samples_);
    w0 /= static_cast<double>(batch.size());
    grad.assign(n_, -1.0);
    grad[0] = -w0;
    double f = -w0 * theta[0];
    for (std::size_t j = 1; j < n_; ++j) f -= theta[j];
    return f;
  }

 private:
  std::size_t n_, samples_;
};

Dataset subset(const Dataset& ds, std::size_t train_rows, std::size_t test_rows) {
  Dataset out;
  out.name = ds.name;
  out.num_classes = ds.num_classes;
  auto take = [&](const std::vector<std::size_t>& rows, std::size_t count,
                  std::vector<std::size_t>& dest) {
    for (std::size_t i = 0; i < std::min(count, rows.size()); ++i) {
      dest.push_back(out.inputs.size());
      out.inputs.push_back(ds.inputs[rows[i]]);
      if (!ds.labels.empty()) out.labels.push_back(ds.labels[rows[i]]);
      if (!ds.targets.empty()) out.targets.push_back(ds.targets[rows[i]]);
    }
  };
  take(ds.train, train_rows, out.train);
  take(ds.test, test_rows, out.test);
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

CheckResult iris_experiment(const CheckOptions& opts) {
  const auto path = resolve_data_dir(opts) / "iris.csv";
  std::size_t wins = 0;
  std::ostringstream os;
  bool count_ok = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto ds = std::make_shared<Dataset>(load_iris(path, seed));
    standardize(*ds);
    const MlpSpec spec = iris_mlp_spec(seed);
    count_ok = count_ok && spec.parameter_count() == 2953;
    const Mlp net(spec, ds);
    BatchSchedule sched;
    sched.initial_batch = 16;
    sched.seed = seed;

    ArcsConfig acfg;
    acfg.memory = 10;
    BatchSchedule arcs_sched = sched;
    arcs_sched.max_iters_per_batch = 10;
    auto arcs_opt = make_arcs_optimizer(acfg);
    const StochasticResult ra = run_epochs(net, *arcs_opt, arcs_sched, 50, net.initial_parameters(), &net);

    auto adam = make_baseline_optimizer(BaselineConfig::defaults(BaselineMethod::adam));
    const StochasticResult rb = run_epochs(net, *adam, sched, 50, net.initial_parameters(), &net);

    const std::size_t ea = first_epoch_reaching(ra, 0.9);
    const std::size_t eb = first_epoch_reaching(rb, 0.9);
    const bool pass = ea != kNever && ea <= eb;
    wins += pass;
    os << "seed " << seed << ": arcs " << epochs_text(ea) << " epochs (final "
       << ra.epochs.back().accuracy.value_or(0.0) << "), adam " << epochs_text(eb)
       << " epochs (final " << rb.epochs.back().accuracy.value_or(0.0) << ")"
       << (pass ? " pass" : " fail") << "; ";
  }
  os << "parameters " << (count_ok ? "2953" : "mismatch");
  return {8, "", wins >= 2 && count_ok, os.str()};
}

CheckResult autoencoder_experiment(const CheckOptions& opts) {
  const auto dir = resolve_data_dir(opts);
  Dataset base = load_idx(dir / "digits-images-idx3-ubyte", dir / "digits-labels-idx1-ubyte", 1000);
  base.train.resize(base.size());
  std::iota(base.train.begin(), base.train.end(), 0);
  base.test.clear();
  make_autoencoder(base);
  auto ds = std::make_shared<Dataset>(std::move(base));
  std::size_t wins = 0;
  std::ostringstream os;
  os << ds->size() << " images of " << ds->input_dim() << " pixels; ";
  for (std::uint64_t seed : {1, 2, 3}) {
    MlpSpec spec;
    spec.widths = {ds->input_dim(), 32, ds->input_dim()};
    spec.loss = Loss::mse;
    spec.output = Activation::sigmoid;
    spec.init_seed = seed;
    const Mlp net(spec, ds);
    BatchSchedule sched;
    sched.initial_batch = 100;
    sched.seed = seed;

    BatchSchedule arcs_sched = sched;
    arcs_sched.max_iters_per_batch = 10;
    auto arcs_opt = make_arcs_optimizer(ArcsConfig{});
    const StochasticResult ra =
        run_epochs(net, *arcs_opt, arcs_sched, 50, net.initial_parameters());
    auto sgd = make_baseline_optimizer(BaselineConfig::defaults(BaselineMethod::sgd_momentum));
    const StochasticResult rb = run_epochs(net, *sgd, sched, 50, net.initial_parameters());
    const double fa = ra.epochs.back().f_train;
    const double fb = rb.epochs.back().f_train;
    const bool pass = fa <= fb;
    wins += pass;
    os << "seed " << seed << ": arcs mse " << fa << ", sgd mse " << fb << (pass ? " pass" : " fail")
       << "; ";
  }
  return {9, "", wins >= 2, os.str()};
}

CheckResult batch_growth(const CheckOptions&) {
  std::ostringstream os;
  bool ok = true;
  {
    const std::size_t n = 1000, d0 = 8;
    const ConstantObjective obj(3, n);
    BatchSchedule sched;
    sched.initial_batch = d0;
    sched.seed = 5;
    auto opt = make_arcs_optimizer(ArcsConfig{});
    const StochasticResult r = run_epochs(obj, *opt, sched, 10, Vector(3, 0.0));
    const auto expected_events =
        static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n) / d0)));
    const bool monotone = std::is_sorted(r.batch_sizes.begin(), r.batch_sizes.end());
    const bool reached = !r.batch_sizes.empty() && r.batch_sizes.back() == n;
    ok = ok && monotone && reached && r.growth_events == expected_events;
    os << "constant loss: final batch " << (r.batch_sizes.empty() ? 0 : r.batch_sizes.back())
       << " of " << n << " after " << r.growth_events << " growth events (expected "
       << expected_events << ")" << (monotone ? "" : ", not monotone") << "; ";
  }
  {
    const std::size_t n = 512, d0 = 32;
    const LinearObjective obj(4, n);
    BatchSchedule sched;
    sched.initial_batch = d0;
    sched.seed = 6;
    sched.max_iters_per_batch = 2;
    auto opt = make_arcs_optimizer(ArcsConfig{});
    const StochasticResult r = run_epochs(obj, *opt, sched, 4, Vector(4, 0.0));
    const bool constant = std::all_of(r.batch_sizes.begin(), r.batch_sizes.end(),
                                      [&](std::size_t d) { return d == d0; });
    ok = ok && constant && r.growth_events == 0;
    os << "improving loss: " << r.growth_events << " growth events over " << r.batch_sizes.size()
       << " iterations";
  }
  return {10, "", ok, os.str()};
}

CheckResult gradient_conformance(const CheckOptions& opts) {
  Rng rng(1111);
  std::vector<std::pair<std::string, std::shared_ptr<const Objective>>> objectives;
  std::vector<std::shared_ptr<const Objective>> keep;
  objectives.emplace_back("quadratic_dense",
                          std::make_shared<Quadratic>(Quadratic::random_dense(8, 50.0, 3)));
  objectives.emplace_back("quadratic_diagonal", std::make_shared<Quadratic>(Quadratic::diagonal(
                                                    {1.0, 2.0, 5.0, 10.0}, {1.0, -1.0, 0.5, 2.0}, 0.3)));
  objectives.emplace_back("rosenbrock_2", std::make_shared<Rosenbrock>(2));
  objectives.emplace_back("rosenbrock_7", std::make_shared<Rosenbrock>(7));

  BlobSpec bspec;
  bspec.classes = 3;
  bspec.dim = 4;
  bspec.per_class = 20;
  bspec.seed = 4;
  auto blobs = std::make_shared<Dataset>(synth_blobs(bspec));
  objectives.emplace_back("logistic_blobs", std::make_shared<LogisticRegression>(blobs, 1e-3));
  for (Activation act : {Activation::relu, Activation::sigmoid, Activation::tanh, Activation::identity}) {
    MlpSpec spec;
    spec.widths = {4, 6, 5, 3};
    spec.hidden = act;
    spec.init_seed = 2;
    objectives.emplace_back("mlp_blobs_" + std::to_string(static_cast<int>(act)),
                            std::make_shared<Mlp>(spec, blobs));
  }
  {
    MlpSpec spec;
    spec.widths = {4, 7, 4};
    spec.hidden = Activation::tanh;
    spec.loss = Loss::mse;
    spec.output = Activation::sigmoid;
    auto regression = std::make_shared<Dataset>(*blobs);
    make_autoencoder(*regression);
    objectives.emplace_back("mlp_mse_blobs", std::make_shared<Mlp>(spec, regression));
  }

  const auto dir = resolve_data_dir(opts);
  auto iris = std::make_shared<Dataset>(subset(load_iris(dir / "iris.csv", 1), 24, 6));
  standardize(*iris);
  objectives.emplace_back("iris_mlp", std::make_shared<Mlp>(iris_mlp_spec(1), iris));
  Dataset digits = load_idx(dir / "digits-images-idx3-ubyte", dir / "digits-labels-idx1-ubyte", 20);
  digits.train.resize(digits.size());
  std::iota(digits.train.begin(), digits.train.end(), 0);
  make_autoencoder(digits);
  MlpSpec ae;
  ae.widths = {64, 32, 64};
  ae.loss = Loss::mse;
  ae.output = Activation::sigmoid;
  auto digits_ptr = std::make_shared<Dataset>(std::move(digits));
  objectives.emplace_back("autoencoder", std::make_shared<Mlp>(ae, digits_ptr));
  auto parent = std::make_shared<Mlp>(MlpSpec{{4, 6, 3}}, blobs);
  keep.push_back(parent);
  objectives.emplace_back("batch_view",
                          std::make_shared<BatchView>(*parent, std::vector<std::size_t>{0, 3, 7, 11}, 1));

  std::size_t failures = 0;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, obj] : objectives) {
    const bool network = name.find("mlp") != std::string::npos || name == "autoencoder" ||
                         name == "batch_view";
    for (int point = 0; point < 10; ++point) {
      Vector theta(obj->dim());
      for (double& t : theta) t = network ? uniform(rng, -0.5, 0.5) : uniform(rng, -2.0, 2.0);
      const double err = gradient_check_error(*obj, theta);
      if (err > worst) {
        worst = err;
        worst_name = name;
      }
      if (!(err <= 1e-5)) ++failures;
    }
  }
  std::ostringstream os;
  os << objectives.size() << " objectives x 10 points, " << failures << " failures, worst "
     << worst << " (" << worst_name << ")";
  return {11, "", failures == 0, os.str()};
}

CheckResult complexity_scaling(const CheckOptions&) {
  using clock = std::chrono::steady_clock;
  std::vector<double> logn, logt;
  std::ostringstream os;
  for (std::size_t n : {1000, 10000, 100000}) {
    Vector d(n), b(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      d[i] = std::pow(1e4, static_cast<double>(i) / static_cast<double>(n - 1));
    const Quadratic q = Quadratic::diagonal(std::move(d), std::move(b));
    ArcsConfig cfg;
    cfg.memory = 10;
    ArcsSolver solver(cfg);
    solver.start(q, Vector(n, 0.0));
    for (int k = 0; k < 15; ++k) solver.step(q);
    const int timed = 30;
    const auto t0 = clock::now();
    for (int k = 0; k < timed; ++k) solver.step(q);
    const double per_iter = std::chrono::duration<double>(clock::now() - t0).count() / timed;
    logn.push_back(std::log(static_cast<double>(n)));
    logt.push_back(std::log(per_iter));
    os << "n=" << n << ": " << per_iter * 1e3 << " ms/iter; ";
  }
  const double mx = std::accumulate(logn.begin(), logn.end(), 0.0) / 3.0;
  const double my = std::accumulate(logt.begin(), logt.end(), 0.0) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    sxy += (logn[i] - mx) * (logt[i] - my);
    sxx += (logn[i] - mx) * (logn[i] - mx);
  }
  const double slope = sxy / sxx;
  os << "fitted exponent " << slope;
  return {12, "", slope <= 1.3, os.str()};
}

CheckResult cli_determinism(const CheckOptions& opts) {
  namespace fs = std::filesystem;
  fs::path scratch = opts.scratch_dir;
  if (scratch.empty())
    scratch = fs::temp_directory_path() /
              ("arcs_check_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  fs::create_directories(scratch);
  const std::string data = resolve_data_dir(opts).string();

  const std::vector<std::pair<std::string, std::string>> configs{
      {"quadratic.yaml",
       "seed: 3\nproblem:\n  name: quadratic\n  dim: 20\n  condition: 1000\n"
       "optimizer:\n  name: arcs_lsr1\n  memory: 5\niterations: 40\n"},
      {"logistic.yaml",
       "seed: 4\nproblem:\n  name: logistic\n  dataset: blobs\n  blobs: {classes: 3, dim: 4}\n"
       "optimizer:\n  name: arcs_lsr1\nschedule:\n  initial_batch: 16\n  max_iters_per_batch: 3\n"
       "epochs: 4\n"},
      {"iris.yaml",
       "seed: 5\nproblem:\n  name: iris_mlp\n  data_dir: " + data + "\n"
       "optimizer:\n  name: adam\nschedule:\n  initial_batch: 32\nepochs: 3\n"},
  };

  bool ok = true;
  std::ostringstream os;
  const std::regex number(R"(-?\d+(\.\d+)?|nan|inf|-inf|)");
  for (const auto& [file, text] : configs) {
    const fs::path cfg_path = scratch / file;
    std::ofstream(cfg_path, std::ios::binary) << text;
    std::string first, second;
    for (const char* run : {"a", "b"}) {
      bench::CommandOptions co;
      co.out_dir = scratch / run;
      std::ostringstream out, err;
      const int code = bench::cmd_run(cfg_path, co, out, err);
      if (code != 0) {
        ok = false;
        os << file << " exit " << code << ": " << err.str() << "; ";
        continue;
      }
      const std::string line = out.str();
      const auto pos = line.find("trace=");
      const std::string trace = line.substr(pos + 6, line.find('\n', pos) - pos - 6);
      (std::string(run) == "a" ? first : second) = read_file(trace);
    }
    if (first.empty() || first != second) {
      ok = false;
      os << file << ": traces differ; ";
      continue;
    }
    std::istringstream lines(first);
    std::string header, row;
    std::getline(lines, header);
    if (header != trace_header()) {
      ok = false;
      os << file << ": header mismatch; ";
    }
    std::size_t rows = 0;
    while (std::getline(lines, row)) {
      ++rows;
      std::vector<std::string> fields;
      std::stringstream ss(row);
      std::string f;
      while (std::getline(ss, f, ',')) fields.push_back(f);
      if (!row.empty() && row.back() == ',') fields.emplace_back();
      bool well_formed = fields.size() == 11;
      for (const auto& x : fields) well_formed = well_formed && std::regex_match(x, number);
      if (!well_formed) {
        ok = false;
        os << file << ": malformed row '" << row << "'; ";
        break;
      }
    }
    os << file << ": " << rows << " identical rows; ";
  }

  TraceRow golden;
  golden.iter = 3;
  golden.f_train = 1.0 / 3.0;
  golden.grad_norm = 12345.678;
  golden.mu = 0.5;
  golden.rho = -2.5e-7;
  golden.step_norm = 0.0;
  const std::string expected =
      "3,,0.333333333333,,,12345.6780000,0.500000000000,,-0.000000250000000000,0.00000000000,";
  if (format_row(golden) != expected) {
    ok = false;
    os << "golden row mismatch: " << format_row(golden);
  } else {
    os << "golden header and row match";
  }
  std::error_code ec;
  if (opts.scratch_dir.empty()) fs::remove_all(scratch, ec);
  return {13, "", ok, os.str()};
}

}  // namespace arcs::checks
