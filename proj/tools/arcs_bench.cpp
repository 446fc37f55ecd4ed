#include <CLI11.hpp>

#include <iostream>

#include "arcs/bench/commands.hpp"
#include "arcs/checks.hpp"
#include "arcs/cubic_subproblem.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ARCs-LSR1 optimization benchmarks"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir;
  auto* seed_opt = app.add_option("--seed", seed, "Override the configured seed");
  auto* out_opt = app.add_option("--out-dir", out_dir, "Override the configured output directory");

  std::string config;
  auto* run = app.add_subcommand("run", "Run one optimizer on one problem");
  run->add_option("config", config, "YAML configuration")->required()->check(CLI::ExistingFile);
  auto* compare = app.add_subcommand("compare", "Run several optimizers on one problem");
  compare->add_option("config", config, "YAML configuration")->required()->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep", "Grid over memory, max-iterations and batch size");
  sweep->add_option("config", config, "YAML configuration")->required()->check(CLI::ExistingFile);

  std::string level = "fast";
  std::string fault;
  auto* check = app.add_subcommand("check", "Run the invariant and oracle battery");
  check->add_option("--level", level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}));
  check->add_option("--inject-fault", fault)->group("")->check(CLI::IsMember({"scalar-sign-flip"}));

  CLI11_PARSE(app, argc, argv);

  arcs::bench::CommandOptions opts;
  if (*seed_opt) opts.seed = seed;
  if (*out_opt) opts.out_dir = out_dir;

  if (*run) return arcs::bench::cmd_run(config, opts, std::cout, std::cerr);
  if (*compare) return arcs::bench::cmd_compare(config, opts, std::cout, std::cerr);
  if (*sweep) return arcs::bench::cmd_sweep(config, opts, std::cout, std::cerr);

  arcs::checks::CheckOptions copts;
  if (fault == "scalar-sign-flip")
    copts.scalar = [](double g, double lam, double mu) { return -arcs::scalar_cubic_min(g, lam, mu); };
  const auto lvl = level == "full" ? arcs::checks::Level::full : arcs::checks::Level::fast;
  return arcs::checks::cmd_check(lvl, copts, std::cout, std::cerr);
}
