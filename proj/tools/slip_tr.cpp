// slip-tr: trust-region sweeps over the heat and deconvolution benchmarks.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "slip/errors.hpp"
#include "slip/experiment.hpp"

namespace {

int jobs_from_env() {
  const char* env = std::getenv("SLIP_TR_JOBS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw slip::ConfigError(fmt::format("SLIP_TR_JOBS='{}' is not a positive integer", env));
  return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region solver for integer controls with total-variation regularization"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run an alpha/policy sweep and write CSV tables");
  std::string config_file, benchmark, alphas, policies, out, init;
  std::optional<int> n_cells, jobs;
  std::optional<double> sigma, delta0, delta_max;
  std::optional<long long> seed, max_iterations;
  bool plots = false, histories = false;
  sweep->add_option("--config", config_file, "key = value file; flags override it")->check(CLI::ExistingFile);
  sweep->add_option("--benchmark", benchmark, "heat or deconv");
  sweep->add_option("--n-cells", n_cells, "grid cells (default 512)");
  sweep->add_option("--alphas", alphas, "comma-separated TV weights");
  sweep->add_option("--policy", policies, "comma-separated subset of nr,rt");
  sweep->add_option("--sigma", sigma, "acceptance ratio in (0, 1)");
  sweep->add_option("--delta0", delta0, "initial radius");
  sweep->add_option("--delta-max", delta_max, "radius cap");
  sweep->add_option("--max-iterations", max_iterations, "iteration guard per run");
  sweep->add_option("--init", init, "initial control: zero or random");
  sweep->add_option("--seed", seed, "seed for --init random");
  sweep->add_option("--out", out, "output directory");
  sweep->add_option("--jobs", jobs, "parallel runs (fallback: SLIP_TR_JOBS, then 1)");
  sweep->add_flag("--plots", plots, "write an SVG of every final control");
  sweep->add_flag("--histories", histories, "write per-iteration logs");

  // summarize
  auto* summarize = app.add_subcommand("summarize", "Compare policies from an existing rows.csv");
  std::string rows_path, summary_out;
  summarize->add_option("rows", rows_path, "rows.csv from a sweep")->required()->check(CLI::ExistingFile);
  summarize->add_option("--out", summary_out, "directory for summary.md and summary.csv (default: print)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      slip::ExperimentConfig cfg;
      cfg.jobs = jobs_from_env();
      if (!config_file.empty()) slip::load_config_file(config_file, cfg);
      if (!benchmark.empty()) cfg.benchmark = slip::parse_benchmark(benchmark);
      if (n_cells) cfg.n_cells = *n_cells;
      if (sweep->count("--alphas") > 0) slip::apply_config_value(cfg, "alphas", alphas);
      if (sweep->count("--policy") > 0) slip::apply_config_value(cfg, "policies", policies);
      if (sigma) cfg.sigma = *sigma;
      if (delta0) cfg.delta0 = *delta0;
      if (delta_max) cfg.delta_max = *delta_max;
      if (max_iterations) cfg.max_iterations = *max_iterations;
      if (!init.empty()) slip::apply_config_value(cfg, "init", init);
      if (seed) cfg.seed = static_cast<std::uint64_t>(*seed);
      if (!out.empty()) cfg.output_dir = out;
      if (jobs) cfg.jobs = *jobs;
      cfg.plots = cfg.plots || plots;
      cfg.histories = cfg.histories || histories;

      const auto rows = slip::run_experiment(cfg);
      std::cout << slip::summary_markdown(slip::summarize(rows));
      std::cout << fmt::format("{} rows written to {}\n", rows.size(), (cfg.output_dir / "rows.csv").string());
    } else if (summarize->parsed()) {
      const auto summary = slip::summarize(slip::read_rows_csv(rows_path));
      if (summary_out.empty()) {
        std::cout << slip::summary_markdown(summary);
      } else {
        const std::filesystem::path dir = summary_out;
        std::filesystem::create_directories(dir);
        slip::write_summary_csv(dir / "summary.csv", summary);
        std::ofstream md(dir / "summary.md");
        md << slip::summary_markdown(summary);
        if (!md) throw slip::IoError(fmt::format("failed writing {}", (dir / "summary.md").string()));
      }
    }
  } catch (const slip::ConfigError& e) {
    std::cerr << "slip-tr: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const slip::StructuralError& e) {
    std::cerr << "slip-tr: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "slip-tr: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
