// Command-line front end for the simulation harness.

#include "gpsim/config.hpp"
#include "gpsim/experiments.hpp"
#include "gpsim/report.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <optional>

namespace {

void print_summary(const gpsim::ExperimentReport& report) {
  fmt::print("{:<18} {:>6} {:<12} {:>5} {:<22} {:<24} {:>14}\n", "experiment", "n", "method", "M",
             "param", "statistic", "value");
  for (const auto& r : report.rows)
    fmt::print("{:<18} {:>6} {:<12} {:>5} {:<22} {:<24} {:>14.6g}\n", r.experiment, r.n, r.method,
               gpsim::format_number(r.M), r.param, r.statistic, r.value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Gaussian-process regression: scale selection, credible sets and experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> experiment;
  bool trace = false;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides `output`)");
  run->add_option("--seed", seed, "Base seed (overrides `seed`)");
  run->add_option("--jobs", jobs, "Worker threads (overrides `jobs`)")->check(CLI::PositiveNumber);
  run->add_option("--experiment", experiment, "Experiment name (overrides `experiment`)");
  run->add_flag("--trace", trace, "Also write per-replication CSVs under trace/");
  run->add_flag("-q,--quiet", quiet, "Do not print the summary table");

  auto* check = app.add_subcommand("validate", "Parse and validate a config file");
  check->add_option("config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    gpsim::ExperimentConfig cfg = gpsim::load_config_file(config_path);
    if (check->parsed()) {
      fmt::print("ok: {} (config hash {})\n", gpsim::to_string(cfg.experiment), cfg.hash());
      return 0;
    }
    if (out_dir) cfg.output = *out_dir;
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (experiment) cfg.experiment = gpsim::experiment_kind_from_string(*experiment);
    cfg.trace = cfg.trace || trace;
    cfg.validate();

    const auto start = std::chrono::steady_clock::now();
    const gpsim::ExperimentReport report = gpsim::run_experiment(cfg);
    gpsim::write_report(report, cfg.output, cfg.trace);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!quiet) print_summary(report);
    fmt::print(stderr, "wrote {} rows to {} in {:.1f}s\n", report.rows.size(),
               (cfg.output / "report.csv").string(), secs);
    return 0;
  } catch (const gpsim::ConfigError& e) {
    fmt::print(stderr, "{}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
