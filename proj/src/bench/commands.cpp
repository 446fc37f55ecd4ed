#include "arcs/bench/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "arcs/errors.hpp"

namespace arcs::bench {

namespace {

std::optional<double> finite(double x) {
  if (std::isfinite(x)) return x;
  return std::nullopt;
}

std::unique_ptr<StochasticOptimizer> make_optimizer(const RunConfig& cfg, const OptimizerSpec& o) {
  if (o.is_arcs()) {
    ArcsConfig a = o.arcs;
    a.k_max = cfg.iterations;
    return make_arcs_optimizer(a);
  }
  BaselineConfig b = o.baseline;
  b.max_iter = cfg.iterations;
  return make_baseline_optimizer(b);
}

void apply_overrides(RunConfig& cfg, const CommandOptions& opts) {
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

struct Loaded {
  RunConfig cfg;
  Problem problem;
};

/// Config and problem loading shared by the commands; nullopt after
/// reporting the error.
std::optional<Loaded> load(const std::filesystem::path& config, const CommandOptions& opts,
                           std::ostream& err) {
  try {
    Loaded l;
    l.cfg = load_config(config);
    apply_overrides(l.cfg, opts);
    l.problem = build_problem(l.cfg.problem, l.cfg.seed);
    return l;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "invalid problem: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return std::nullopt;
}

std::filesystem::path trace_path(const RunConfig& cfg, const std::string& problem,
                                 const std::string& optimizer) {
  return cfg.out_dir / (problem + "_" + optimizer + ".csv");
}

}  // namespace

RunOutcome execute(const RunConfig& cfg, const Problem& problem, const OptimizerSpec& spec) {
  using clock = std::chrono::steady_clock;
  const Objective& obj = *problem.objective;
  const SupervisedObjective* sup = problem.supervised.get();
  auto opt = make_optimizer(cfg, spec);
  RunOutcome out;
  out.optimizer = spec.name;

  if (cfg.schedule) {
    BatchSchedule sched = *cfg.schedule;
    sched.seed = cfg.seed;
    StochasticResult res;
    try {
      res = run_epochs(obj, *opt, sched, cfg.epochs, problem.theta0, sup);
    } catch (const NumericFailure& e) {
      out.stop = "numeric_failure";
      out.failure = e.what();
      return out;
    }
    out.diagnostics = res.diagnostics;
    double previous = 0.0;
    for (const EpochRecord& e : res.epochs) {
      TraceRow row;
      row.iter = e.iter;
      row.epoch = e.epoch;
      row.f_train = e.f_train;
      row.f_test = e.f_test;
      row.accuracy = e.accuracy;
      row.grad_norm = e.grad_norm;
      row.mu = e.mu;
      row.batch_size = e.batch_size;
      row.rho = e.rho;
      row.step_norm = e.step_norm;
      if (cfg.wall_clock) row.wall_seconds = e.wall_seconds - previous;
      previous = e.wall_seconds;
      out.rows.push_back(row);
    }
    out.wall_seconds = res.epochs.back().wall_seconds;
    out.stop = "epochs";
  } else {
    opt->begin_batch(obj, problem.theta0);
    auto report = [&](TraceRow& row) {
      Vector g;
      row.f_train = obj.value_and_gradient(opt->theta(), g);
      row.grad_norm = norm2(g);
      if (sup) {
        row.f_test = finite(sup->test_value(opt->theta()));
        row.accuracy = sup->test_accuracy(opt->theta());
      }
    };
    TraceRow first;
    report(first);
    if (cfg.wall_clock) first.wall_seconds = 0.0;
    out.rows.push_back(first);
    out.stop = "max_iter";
    for (std::size_t k = 1; k <= cfg.iterations; ++k) {
      if (opt->converged() || (spec.is_arcs() && out.rows.back().grad_norm <= spec.arcs.grad_tol)) {
        out.stop = "converged";
        break;
      }
      const auto t0 = clock::now();
      IterRecord rec;
      try {
        rec = opt->iterate(obj);
      } catch (const NumericFailure& e) {
        out.stop = "numeric_failure";
        out.failure = "iteration " + std::to_string(k) + ": " + e.what();
        break;
      }
      const double dt = std::chrono::duration<double>(clock::now() - t0).count();
      out.wall_seconds += dt;
      TraceRow row;
      row.iter = k;
      report(row);
      row.mu = finite(rec.mu);
      row.rho = finite(rec.rho);
      row.step_norm = rec.step_norm;
      if (cfg.wall_clock) row.wall_seconds = dt;
      out.rows.push_back(row);
    }
  }
  for (const auto& r : out.rows)
    if (r.accuracy) out.best_accuracy = std::max(out.best_accuracy.value_or(0.0), *r.accuracy);
  if (!out.rows.empty()) out.final_f_train = out.rows.back().f_train;
  return out;
}

int cmd_run(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
            std::ostream& err) {
  auto loaded = load(config, opts, err);
  if (!loaded) return 2;
  const RunConfig& cfg = loaded->cfg;
  if (cfg.optimizers.size() != 1) {
    err << "config error: " << config.string() << ": run needs exactly one 'optimizer'\n";
    return 2;
  }
  const RunOutcome r = execute(cfg, loaded->problem, cfg.optimizers.front());
  for (const auto& d : r.diagnostics) err << "note: " << d << '\n';
  const auto path = trace_path(cfg, loaded->problem.name, r.optimizer);
  try {
    write_trace_file(path, r.rows);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  out << "run problem=" << loaded->problem.name << " optimizer=" << r.optimizer
      << " rows=" << r.rows.size() << " f_train=" << format_number(r.final_f_train)
      << " best_accuracy=" << opt_text(r.best_accuracy) << " stop=" << r.stop
      << " trace=" << path.string() << '\n';
  if (r.stop == "numeric_failure") {
    err << "numeric failure: " << r.failure << '\n';
    return 3;
  }
  return 0;
}

int cmd_compare(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
                std::ostream& err) {
  auto loaded = load(config, opts, err);
  if (!loaded) return 2;
  const RunConfig& cfg = loaded->cfg;
  if (cfg.optimizers.empty()) {
    err << "config error: " << config.string() << ": compare needs 'optimizers'\n";
    return 2;
  }
  std::map<std::string, int> seen;
  std::vector<RunOutcome> results;
  int code = 0;
  for (const auto& spec : cfg.optimizers) {
    RunOutcome r = execute(cfg, loaded->problem, spec);
    for (const auto& d : r.diagnostics) err << "note: " << d << '\n';
    std::string label = r.optimizer;
    if (const int n = seen[label]++; n > 0) label += "_" + std::to_string(n + 1);
    r.trace_path = trace_path(cfg, loaded->problem.name, label);
    try {
      write_trace_file(r.trace_path, r.rows);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
    if (r.stop == "numeric_failure") {
      err << "numeric failure in " << label << ": " << r.failure << '\n';
      code = 3;
    }
    r.optimizer = label;
    results.push_back(std::move(r));
  }

  const auto summary = cfg.out_dir / (loaded->problem.name + "_summary.csv");
  std::ofstream csv(summary, std::ios::binary);
  csv << "optimizer,best_accuracy,final_f_train,wall_seconds,stop,trace\n";
  auto brief = [](std::optional<double> v) {
    if (!v) return std::string("-");
    std::ostringstream os;
    os << std::setprecision(6) << *v;
    return os.str();
  };
  out << std::left << std::setw(16) << "optimizer" << std::setw(15) << "best_accuracy"
      << std::setw(15) << "final_f_train";
  if (cfg.wall_clock) out << std::setw(14) << "wall_seconds";
  out << "stop\n";
  for (const auto& r : results) {
    csv << r.optimizer << ',' << opt_text(r.best_accuracy) << ',' << format_number(r.final_f_train)
        << ',' << (cfg.wall_clock ? format_number(r.wall_seconds) : "") << ',' << r.stop << ','
        << r.trace_path.filename().string() << '\n';
    out << std::left << std::setw(16) << r.optimizer << std::setw(15) << brief(r.best_accuracy)
        << std::setw(15) << brief(r.final_f_train);
    if (cfg.wall_clock) out << std::setw(14) << brief(r.wall_seconds);
    out << r.stop << '\n';
  }
  if (!csv) {
    err << "error: cannot write " << summary.string() << '\n';
    return 2;
  }
  out << "summary=" << summary.string() << '\n';
  return code;
}

int cmd_sweep(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out,
              std::ostream& err) {
  auto loaded = load(config, opts, err);
  if (!loaded) return 2;
  const RunConfig& cfg = loaded->cfg;
  const Problem& p = loaded->problem;
  if (p.objective->dataset_size() == 0) {
    err << "config error: " << config.string() << ": sweep needs a data-backed problem\n";
    return 2;
  }
  ArcsConfig base;
  for (const auto& o : cfg.optimizers)
    if (o.is_arcs()) base = o.arcs;
  BatchSchedule sched = cfg.schedule.value_or(BatchSchedule{});
  sched.seed = cfg.seed;

  std::vector<SweepRow> rows;
  try {
    rows = hyperparameter_sweep(*p.objective, p.theta0, base, sched, cfg.sweep, cfg.epochs,
                                p.supervised.get());
  } catch (const NumericFailure& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 3;
  }
  const auto path = cfg.out_dir / (p.name + "_sweep.csv");
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream csv(path, std::ios::binary);
  csv << "memory,max_iters,batch,early_accuracy,final_accuracy,final_train_loss,wall_seconds\n";
  for (const auto& r : rows) {
    csv << r.memory << ',' << r.max_iters << ',' << r.batch << ',' << opt_text(r.early_accuracy)
        << ',' << opt_text(r.final_accuracy) << ',' << format_number(r.final_train_loss) << ','
        << (cfg.wall_clock ? format_number(r.wall_seconds) : "") << '\n';
    out << "memory=" << r.memory << " max_iters=" << r.max_iters << " batch=" << r.batch
        << " early_accuracy=" << opt_text(r.early_accuracy)
        << " final_accuracy=" << opt_text(r.final_accuracy)
        << " final_train_loss=" << format_number(r.final_train_loss) << '\n';
    for (const auto& d : r.run.diagnostics) err << "note: " << d << '\n';
  }
  if (!csv) {
    err << "error: cannot write " << path.string() << '\n';
    return 2;
  }
  out << "sweep=" << path.string() << " cells=" << rows.size() << '\n';
  return 0;
}

}  // namespace arcs::bench
