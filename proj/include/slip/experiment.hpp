#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slip/driver.hpp"
#include "slip/problem.hpp"

namespace slip {

enum class Benchmark { Heat, Deconv };

std::string_view to_string(Benchmark b);
/// "heat" or "deconv"; anything else is a ConfigError.
Benchmark parse_benchmark(std::string_view text);

std::unique_ptr<Problem> make_problem(Benchmark b, int n_cells);

enum class InitialControl { Zero, Random };

struct ExperimentConfig {
  Benchmark benchmark = Benchmark::Deconv;
  int n_cells = 512;
  std::vector<double> alphas{1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4, 1e-3};
  std::vector<RadiusPolicy> policies{RadiusPolicy::DoubleNoReset, RadiusPolicy::ResetOnSuccess};
  double sigma = 1e-3;
  std::optional<double> delta0;     // default (b - a) * span
  std::optional<double> delta_max;  // default max(delta0, (b - a) * span)
  std::int64_t max_iterations = 1'000'000;
  InitialControl init = InitialControl::Zero;
  std::uint64_t seed = 0;  // used by InitialControl::Random
  std::filesystem::path output_dir = "out";
  int jobs = 1;
  bool plots = false;
  bool histories = false;

  void validate() const;
  TrustRegionConfig trust_region(const Problem& problem, double alpha, RadiusPolicy policy) const;
  Control initial_control(const Problem& problem) const;
};

/// Reads flat `key = value` lines ('#' starts a comment) into config.
/// Keys: benchmark, n_cells, alphas, policies, sigma, delta0, delta_max,
/// max_iterations, init, seed, out, jobs, plots, histories.
void load_config_file(const std::filesystem::path& path, ExperimentConfig& config);
/// Applies a single key/value pair; shared by the file reader and the CLI.
void apply_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

struct ExperimentRow {
  double alpha = 0.0;
  RadiusPolicy policy = RadiusPolicy::DoubleNoReset;
  double runtime_seconds = 0.0;
  double final_objective = 0.0;
  std::int64_t iterations = 0;
  std::int64_t accepted_iterations = 0;
  double final_criticality = 0.0;
  std::int64_t final_tv = 0;
};

struct SweepRun {
  ExperimentRow row;
  SolveResult result;
};

/// One run per (alpha, policy), up to config.jobs at a time, each with its
/// own problem instance. Results are sorted by (alpha, policy).
std::vector<SweepRun> run_sweep_detailed(const ExperimentConfig& config);
std::vector<ExperimentRow> run_sweep(const ExperimentConfig& config);

/// Runs the sweep and writes rows.csv, summary.md, summary.csv, meta.txt and
/// optionally plots/ and histories/ under config.output_dir.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

void write_rows_csv(const std::filesystem::path& path, const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> read_rows_csv(const std::filesystem::path& path);
void write_history_csv(const std::filesystem::path& path, const SolveResult& result);

struct SummaryRow {
  double alpha = 0.0;
  bool complete = false;  // both policies present
  std::string warning;
  double runtime_nr = 0.0;
  double runtime_rt = 0.0;
  double objective_nr = 0.0;
  double objective_rt = 0.0;
  std::int64_t iterations_nr = 0;
  std::int64_t iterations_rt = 0;
  double runtime_improvement = 0.0;  // (t_RT - t_NR) / t_RT
  double objective_gap = 0.0;        // (J_NR - J_RT) / |J_RT|
};

double runtime_improvement(double t_rt, double t_nr);
double objective_gap(double j_nr, double j_rt);

/// One entry per distinct alpha, ascending. Alphas lacking a policy get a
/// warning entry instead of numbers.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows);
std::string summary_markdown(const std::vector<SummaryRow>& summary);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& summary);

/// Standalone SVG step plot: one polyline per plateau, vertical risers at
/// switches, labelled axes.
std::string control_plot_svg(const Control& w, std::string_view title = {});
void emit_control_plot(const Control& w, const std::filesystem::path& path, std::string_view title = {});

}  // namespace slip
