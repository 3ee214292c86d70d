#include "slip/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "slip/benchmarks.hpp"
#include "slip/errors.hpp"

namespace slip {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kRowsHeader =
    "alpha,policy,runtime_seconds,final_objective,iterations,accepted_iterations,final_criticality,final_tv";

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, t));
  }
  return v;
}

std::int64_t parse_int(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, t));
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, t));
}

std::ofstream open_for_writing(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  return out;
}

void finish_writing(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::string policy_key(RadiusPolicy p) { return p == RadiusPolicy::DoubleNoReset ? "nr" : "rt"; }

std::string alpha_tag(double alpha) { return fmt::format("{}", alpha); }

}  // namespace

std::string_view to_string(Benchmark b) { return b == Benchmark::Heat ? "heat" : "deconv"; }

Benchmark parse_benchmark(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "heat") return Benchmark::Heat;
  if (t == "deconv") return Benchmark::Deconv;
  throw ConfigError(fmt::format("unknown benchmark '{}' (expected heat or deconv)", text));
}

std::unique_ptr<Problem> make_problem(Benchmark b, int n_cells) {
  if (b == Benchmark::Heat) return std::make_unique<HeatProblem>(n_cells);
  return std::make_unique<DeconvProblem>(n_cells);
}

void ExperimentConfig::validate() const {
  if (n_cells < 2) throw ConfigError("n_cells must be >= 2");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError(fmt::format("alpha {} must be positive", a));
  }
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("sigma must lie in (0, 1)");
  if (delta0 && !(*delta0 > 0.0)) throw ConfigError("delta0 must be positive");
  if (delta_max && !(*delta_max > 0.0)) throw ConfigError("delta_max must be positive");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

TrustRegionConfig ExperimentConfig::trust_region(const Problem& problem, double alpha, RadiusPolicy policy) const {
  auto c = TrustRegionConfig::defaults(problem.grid(), problem.labels(), alpha, policy);
  c.sigma = sigma;
  c.max_iterations = max_iterations;
  const double diameter = c.delta0;
  if (delta0) c.delta0 = *delta0;
  c.delta_max = delta_max ? *delta_max : std::max(c.delta0, diameter);
  c.validate();
  return c;
}

Control ExperimentConfig::initial_control(const Problem& problem) const {
  const LabelSet& labels = problem.labels();
  if (init == InitialControl::Zero) {
    if (!labels.contains(0)) throw ConfigError("zero is not an admissible control value");
    return Control::constant(problem.grid(), labels, 0);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, labels.size() - 1);
  std::vector<int> cells(static_cast<std::size_t>(problem.grid().n_cells()));
  for (int& c : cells) c = labels[pick(rng)];
  return Control(problem.grid(), labels, std::move(cells));
}

void apply_config_value(ExperimentConfig& config, std::string_view key_in, std::string_view value) {
  std::string key = lower(trim(key_in));
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "benchmark") {
    config.benchmark = parse_benchmark(value);
  } else if (key == "n_cells") {
    config.n_cells = static_cast<int>(parse_int(key, value));
  } else if (key == "alphas") {
    config.alphas.clear();
    for (const auto& part : split(value, ',')) {
      if (!part.empty()) config.alphas.push_back(parse_double(key, part));
    }
  } else if (key == "policies" || key == "policy") {
    config.policies.clear();
    for (const auto& part : split(value, ',')) {
      if (!part.empty()) config.policies.push_back(parse_radius_policy(part));
    }
  } else if (key == "sigma") {
    config.sigma = parse_double(key, value);
  } else if (key == "delta0") {
    config.delta0 = parse_double(key, value);
  } else if (key == "delta_max") {
    config.delta_max = parse_double(key, value);
  } else if (key == "max_iterations") {
    config.max_iterations = parse_int(key, value);
  } else if (key == "init") {
    const std::string v = lower(trim(value));
    if (v == "zero") {
      config.init = InitialControl::Zero;
    } else if (v == "random") {
      config.init = InitialControl::Random;
    } else {
      throw ConfigError(fmt::format("init: '{}' (expected zero or random)", value));
    }
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "out" || key == "output_dir") {
    config.output_dir = trim(value);
  } else if (key == "jobs") {
    config.jobs = static_cast<int>(parse_int(key, value));
  } else if (key == "plots") {
    config.plots = parse_bool(key, value);
  } else if (key == "histories") {
    config.histories = parse_bool(key, value);
  } else {
    throw ConfigError(fmt::format("unknown config key '{}'", key_in));
  }
}

void load_config_file(const fs::path& path, ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config file {}", path.string()));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected key = value", path.string(), line_no));
    }
    try {
      apply_config_value(config, body.substr(0, eq), body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
}

std::vector<SweepRun> run_sweep_detailed(const ExperimentConfig& config) {
  config.validate();
  struct Job {
    double alpha;
    RadiusPolicy policy;
  };
  std::vector<Job> jobs;
  for (double a : config.alphas) {
    for (RadiusPolicy p : config.policies) jobs.push_back({a, p});
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& x, const Job& y) {
    return x.alpha != y.alpha ? x.alpha < y.alpha : x.policy < y.policy;
  });
  jobs.erase(std::unique(jobs.begin(), jobs.end(),
                         [](const Job& x, const Job& y) { return x.alpha == y.alpha && x.policy == y.policy; }),
             jobs.end());

  std::vector<std::optional<SweepRun>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      try {
        const auto problem = make_problem(config.benchmark, config.n_cells);
        const auto tr = config.trust_region(*problem, jobs[k].alpha, jobs[k].policy);
        const Control w0 = config.initial_control(*problem);
        const auto t0 = std::chrono::steady_clock::now();
        SolveResult result = run(*problem, w0, tr);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        ExperimentRow row;
        row.alpha = jobs[k].alpha;
        row.policy = jobs[k].policy;
        row.runtime_seconds = seconds;
        row.final_objective = result.final_objective;
        row.iterations = static_cast<std::int64_t>(result.history.size());
        row.accepted_iterations = result.accepted_iterations();
        row.final_criticality =
            criticality(result.final_control, problem->gradient(result.final_control).interface_values);
        row.final_tv = tv(result.final_control);
        results[k] = SweepRun{row, std::move(result)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(config.jobs, static_cast<int>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRun> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

std::vector<ExperimentRow> run_sweep(const ExperimentConfig& config) {
  std::vector<ExperimentRow> rows;
  for (auto& run : run_sweep_detailed(config)) rows.push_back(run.row);
  return rows;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", config.output_dir.string(), ec.message()));

  const auto runs = run_sweep_detailed(config);
  std::vector<ExperimentRow> rows;
  for (const auto& r : runs) rows.push_back(r.row);

  write_rows_csv(config.output_dir / "rows.csv", rows);
  const auto summary = summarize(rows);
  {
    const fs::path md = config.output_dir / "summary.md";
    auto out = open_for_writing(md);
    out << summary_markdown(summary);
    finish_writing(out, md);
  }
  write_summary_csv(config.output_dir / "summary.csv", summary);
  {
    const fs::path meta = config.output_dir / "meta.txt";
    auto out = open_for_writing(meta);
    out << fmt::format("benchmark = {}\nn_cells = {}\nbenchmark_data_version = {}\nsigma = {}\ninit = {}\nseed = {}\n",
                       to_string(config.benchmark), config.n_cells, data::kBenchmarkDataVersion, config.sigma,
                       config.init == InitialControl::Zero ? "zero" : "random", config.seed);
    finish_writing(out, meta);
  }
  for (const auto& r : runs) {
    const std::string stem = fmt::format("{}_alpha{}_{}", to_string(config.benchmark), alpha_tag(r.row.alpha),
                                         policy_key(r.row.policy));
    if (config.plots) {
      emit_control_plot(r.result.final_control, config.output_dir / "plots" / (stem + ".svg"),
                        fmt::format("{} alpha={} {}", to_string(config.benchmark), r.row.alpha, to_string(r.row.policy)));
    }
    if (config.histories) write_history_csv(config.output_dir / "histories" / (stem + ".csv"), r.result);
  }
  return rows;
}

void write_rows_csv(const fs::path& path, const std::vector<ExperimentRow>& rows) {
  auto out = open_for_writing(path);
  out << kRowsHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.alpha, to_string(r.policy), r.runtime_seconds, r.final_objective,
                       r.iterations, r.accepted_iterations, r.final_criticality, r.final_tv);
  }
  finish_writing(out, path);
}

std::vector<ExperimentRow> read_rows_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::string line;
  if (!std::getline(in, line) || trim(line) != kRowsHeader) {
    throw IoError(fmt::format("{}: missing or unexpected header", path.string()));
  }
  std::vector<ExperimentRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw IoError(fmt::format("{}:{}: expected 8 fields", path.string(), line_no));
    try {
      ExperimentRow r;
      r.alpha = parse_double("alpha", f[0]);
      r.policy = parse_radius_policy(f[1]);
      r.runtime_seconds = parse_double("runtime_seconds", f[2]);
      r.final_objective = parse_double("final_objective", f[3]);
      r.iterations = parse_int("iterations", f[4]);
      r.accepted_iterations = parse_int("accepted_iterations", f[5]);
      r.final_criticality = parse_double("final_criticality", f[6]);
      r.final_tv = parse_int("final_tv", f[7]);
      rows.push_back(r);
    } catch (const ConfigError& e) {
      throw IoError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return rows;
}

void write_history_csv(const fs::path& path, const SolveResult& result) {
  auto out = open_for_writing(path);
  out << "n,delta,pred,ared,accepted,objective,criticality,tv,r_n,wall_time,delta_a,c0,c1,n_max,budget_used\n";
  for (const auto& r : result.history) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.n, r.delta, r.pred, r.ared,
                       r.accepted ? 1 : 0, r.objective, r.criticality, r.tv, r.r_n, r.wall_time, r.delta_a, r.c0,
                       r.c1, r.n_max, r.budget_used);
  }
  finish_writing(out, path);
}

double runtime_improvement(double t_rt, double t_nr) { return (t_rt - t_nr) / t_rt; }

double objective_gap(double j_nr, double j_rt) { return (j_nr - j_rt) / std::abs(j_rt); }

std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows) {
  std::map<double, std::pair<const ExperimentRow*, const ExperimentRow*>> by_alpha;
  for (const auto& r : rows) {
    auto& slot = by_alpha[r.alpha];
    (r.policy == RadiusPolicy::DoubleNoReset ? slot.first : slot.second) = &r;
  }
  std::vector<SummaryRow> out;
  for (const auto& [alpha, pair] : by_alpha) {
    SummaryRow s;
    s.alpha = alpha;
    const auto* nr = pair.first;
    const auto* rt = pair.second;
    if (nr == nullptr || rt == nullptr) {
      s.warning = nr == nullptr ? "missing DoubleNoReset run" : "missing ResetOnSuccess run";
      out.push_back(s);
      continue;
    }
    s.complete = true;
    s.runtime_nr = nr->runtime_seconds;
    s.runtime_rt = rt->runtime_seconds;
    s.objective_nr = nr->final_objective;
    s.objective_rt = rt->final_objective;
    s.iterations_nr = nr->iterations;
    s.iterations_rt = rt->iterations;
    s.runtime_improvement = runtime_improvement(s.runtime_rt, s.runtime_nr);
    s.objective_gap = objective_gap(s.objective_nr, s.objective_rt);
    out.push_back(s);
  }
  return out;
}

std::string summary_markdown(const std::vector<SummaryRow>& summary) {
  std::string md =
      "| alpha | t_NR [s] | t_RT [s] | improvement | J_NR | J_RT | gap | iterations NR | iterations RT |\n"
      "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& s : summary) {
    if (!s.complete) {
      md += fmt::format("| {:.0e} | warning: {} | | | | | | | |\n", s.alpha, s.warning);
      continue;
    }
    md += fmt::format("| {:.0e} | {:.3f} | {:.3f} | {:.1f} % | {:.4e} | {:.4e} | {:.2f} % | {} | {} |\n", s.alpha,
                      s.runtime_nr, s.runtime_rt, 100.0 * s.runtime_improvement, s.objective_nr, s.objective_rt,
                      100.0 * s.objective_gap, s.iterations_nr, s.iterations_rt);
  }
  return md;
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& summary) {
  auto out = open_for_writing(path);
  out << "alpha,runtime_nr,runtime_rt,runtime_improvement,objective_nr,objective_rt,objective_gap,iterations_nr,"
         "iterations_rt,warning\n";
  for (const auto& s : summary) {
    if (!s.complete) {
      out << fmt::format("{},,,,,,,,,{}\n", s.alpha, s.warning);
      continue;
    }
    out << fmt::format("{},{},{},{},{},{},{},{},{},\n", s.alpha, s.runtime_nr, s.runtime_rt, s.runtime_improvement,
                       s.objective_nr, s.objective_rt, s.objective_gap, s.iterations_nr, s.iterations_rt);
  }
  finish_writing(out, path);
}

std::string control_plot_svg(const Control& w, std::string_view title) {
  constexpr double width = 640, height = 360, left = 60, right = 20, top = 30, bottom = 50;
  const Grid& g = w.grid();
  const double y_lo = w.labels().min(), y_hi = w.labels().max();
  auto sx = [&](double x) { return left + (x - g.a()) / g.length() * (width - left - right); };
  auto sy = [&](double y) { return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom); };

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  std::string escaped;
  for (char c : title) {
    if (c == '<') escaped += "&lt;";
    else if (c == '>') escaped += "&gt;";
    else if (c == '&') escaped += "&amp;";
    else escaped += c;
  }
  if (!escaped.empty()) {
    svg += fmt::format("<text x=\"{}\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n", width / 2, escaped);
  }
  // axes
  svg += fmt::format("<g stroke=\"black\" stroke-width=\"1\">\n<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n"
                     "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\"/>\n</g>\n",
                     left, height - bottom, width - right, top);
  svg += "<g font-size=\"11\" font-family=\"sans-serif\">\n";
  for (double x : {g.a(), 0.5 * (g.a() + g.b()), g.b()}) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", sx(x), height - bottom + 16, x);
  }
  for (double y : {y_lo, y_hi}) {
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", left - 6, sy(y) + 4, y);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">x</text>\n", (left + width - right) / 2,
                     height - 12);
  svg += fmt::format("<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">w(x)</text>\n",
                     (top + height - bottom) / 2);
  svg += "</g>\n<g fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\">\n";

  const int n = w.size();
  for (int lo = 0; lo < n;) {
    int hi = lo;
    while (hi + 1 < n && w[hi + 1] == w[lo]) ++hi;
    const double y = sy(w[lo]);
    svg += fmt::format("<polyline points=\"{:.2f},{:.2f} {:.2f},{:.2f}\"/>\n", sx(g.interface(lo)), y,
                       sx(g.interface(hi + 1)), y);
    if (hi + 1 < n) {
      const double x = sx(g.interface(hi + 1));
      svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke-dasharray=\"3,2\"/>\n",
                         x, y, sy(w[hi + 1]));
    }
    lo = hi + 1;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void emit_control_plot(const Control& w, const fs::path& path, std::string_view title) {
  auto out = open_for_writing(path);
  out << control_plot_svg(w, title);
  finish_writing(out, path);
}

}  // namespace slip
