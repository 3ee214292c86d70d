// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero
// if any criterion fails. `--only 3` (repeatable) restricts the run.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "slip/benchmarks.hpp"
#include "slip/driver.hpp"
#include "slip/experiment.hpp"
#include "slip/subproblem.hpp"
#include "support.hpp"

using namespace slip;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

const std::vector<double> kAlphas{1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4, 1e-3};

// Advances idx through all vectors in {0..m-1}^n; false after the last one.
bool next_index(std::vector<int>& idx, int m) {
  int pos = static_cast<int>(idx.size()) - 1;
  while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == m) idx[static_cast<std::size_t>(pos--)] = 0;
  return pos >= 0;
}

bool feasible(const SubproblemSolution& s, const SubproblemInput& in) {
  std::int64_t used = 0;
  for (int i = 0; i < s.w_star.size(); ++i) {
    if (!in.w_bar.labels().contains(s.w_star[i])) return false;
    used += std::abs(s.w_star[i] - in.w_bar[i]);
  }
  return used <= budget_units(in.delta, in.w_bar.grid(), in.w_bar.labels()) && used == s.budget_used;
}

// 1. DP against enumeration on every small instance.
Outcome subproblem_exactness() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> numerator(-64, 64);
  std::uniform_int_distribution<int> alpha_num(1, 32);
  std::normal_distribution<double> normal;
  std::size_t instances = 0, mismatches = 0, infeasible = 0, vector_mismatches = 0;
  std::string first;
  for (int n = 1; n <= 6; ++n) {
    const Grid grid(n, 0.0, 0.25 * n);
    for (int m = 2; m <= 3; ++m) {
      const LabelSet labels = m == 2 ? LabelSet({0, 1}) : LabelSet({-1, 0, 1});
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      do {
        std::vector<int> cells(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) cells[i] = labels[idx[i]];
        const Control w_bar(grid, labels, cells);
        for (int rep = 0; rep < 50; ++rep) {
          // half dyadic (exact ties), half Gaussian
          std::vector<double> g(static_cast<std::size_t>(n));
          for (double& x : g) x = rep % 2 == 0 ? numerator(rng) / 16.0 : normal(rng);
          const double alpha = rep % 2 == 0 ? alpha_num(rng) / 32.0 : std::exp(normal(rng) - 1.0);
          for (int b = 0; b <= 6; ++b) {
            const SubproblemInput in{w_bar, g, 0.25 * b, alpha};
            const auto dp = solve_tr_dp(in);
            const auto bf = solve_tr_bruteforce(in);
            ++instances;
            if (dp.model_value != bf.model_value) {
              ++mismatches;
              if (first.empty()) first = fmt::format("N={} |W|={} B={}: {} vs {}", n, m, b, dp.model_value, bf.model_value);
            }
            if (!(dp.w_star == bf.w_star)) ++vector_mismatches;
            if (!feasible(dp, in) || !feasible(bf, in)) ++infeasible;
          }
        }
      } while (next_index(idx, m));
    }
  }
  return {mismatches == 0 && infeasible == 0,
          fmt::format("{} instances, {} value mismatches, {} tie-rule mismatches, {} infeasible{}", instances, mismatches,
                      vector_mismatches, infeasible, first.empty() ? "" : "; first: " + first)};
}

// 2. pred >= 0 and monotone in the radius.
Outcome pred_properties() {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> cells_dist(2, 40);
  std::size_t negative = 0, decreasing = 0, evaluations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = cells_dist(rng);
    const int lo = std::uniform_int_distribution<int>(-3, 0)(rng);
    const int hi = lo + std::uniform_int_distribution<int>(1, 5)(rng);
    const LabelSet labels = LabelSet::range(lo, hi);
    const Grid grid(n, -1.0, 1.0);
    std::uniform_int_distribution<int> pick(lo, hi);
    std::vector<int> cells(static_cast<std::size_t>(n));
    for (int& c : cells) c = pick(rng);
    std::vector<double> g(static_cast<std::size_t>(n));
    for (double& x : g) x = normal(rng);
    const double alpha = std::exp(2.0 * normal(rng) - 2.0) * grid.h();
    const Control w_bar(grid, labels, cells);
    double last = 0.0;
    const int b_max = n * labels.span();
    for (int b = 0; b <= b_max; b += std::max(1, b_max / 24)) {
      const double p = pred(w_bar, g, grid.h() * b, alpha);
      ++evaluations;
      if (!(p >= 0.0)) ++negative;
      if (p < last) ++decreasing;
      last = p;
    }
  }
  return {negative == 0 && decreasing == 0,
          fmt::format("1000 instances, {} evaluations, {} negative, {} decreasing", evaluations, negative, decreasing)};
}

Control plateau_control(std::mt19937_64& rng, const Problem& p) {
  const int n = p.grid().n_cells();
  const int pieces = std::uniform_int_distribution<int>(2, 8)(rng);
  std::set<int> cuts;
  while (static_cast<int>(cuts.size()) < pieces - 1) cuts.insert(std::uniform_int_distribution<int>(1, n - 1)(rng));
  std::uniform_int_distribution<int> pick(p.labels().min(), p.labels().max());
  std::vector<int> cells(static_cast<std::size_t>(n));
  int value = pick(rng);
  for (int i = 0; i < n; ++i) {
    if (cuts.count(i) != 0) value = pick(rng);
    cells[static_cast<std::size_t>(i)] = value;
  }
  return Control(p.grid(), p.labels(), cells);
}

// 3. pred >= c0 C(w) Delta - c1 Delta^2 for Delta <= Delta_a(w).
Outcome pred_lower_bound() {
  std::mt19937_64 rng(3);
  std::size_t checks = 0, violations = 0, controls = 0;
  double worst = -INFINITY;
  std::string first;
  for (Benchmark b : {Benchmark::Heat, Benchmark::Deconv}) {
    const auto problem = make_problem(b, 256);
    const double h = problem->grid().h();
    int accepted = 0;
    while (accepted < 100) {
      const Control w = plateau_control(rng, *problem);
      const auto grad = problem->gradient(w);
      const double c = criticality(w, grad.interface_values);
      if (!(c > 0.0)) continue;
      ++accepted;
      ++controls;
      const double alpha = kAlphas[std::uniform_int_distribution<std::size_t>(0, kAlphas.size() - 1)(rng)];
      const double j = problem->objective(w) + alpha * static_cast<double>(tv(w));
      const auto n_max = switch_count_bound(j, problem->lower_bound(), alpha);
      const double c0 = pred_bound_c0(n_max, problem->labels());
      const double c1 = interface_lipschitz_bound(problem->grid(), grad.interface_values);
      const double delta_a = min_opposite_switch_distance(w, grad.interface_values);
      for (int k : {1, 2, 4}) {
        const double delta = k * h;
        if (delta > delta_a) continue;
        const double p = pred(w, grad.cell_means, delta, alpha);
        const double bound = c0 * c * delta - c1 * delta * delta;
        ++checks;
        const double slack = (p - bound) / std::max({std::abs(p), std::abs(bound), 1e-300});
        worst = std::max(worst, -slack);
        if (p < bound - 1e-8 * std::max(std::abs(p), std::abs(bound))) {
          ++violations;
          if (first.empty()) {
            first = fmt::format("{} Delta={}h: pred={} bound={}", to_string(b), k, p, bound);
          }
        }
      }
    }
  }
  return {violations == 0 && checks > 0,
          fmt::format("{} controls, {} (control, Delta) checks, {} violations{}", controls, checks, violations,
                      first.empty() ? "" : "; first: " + first)};
}

// 4. Adjoint gradients against central differences.
Outcome gradient_correctness() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (Benchmark b : {Benchmark::Heat, Benchmark::Deconv}) {
    const auto problem = make_problem(b, 256);
    std::uniform_int_distribution<int> pick(problem->labels().min(), problem->labels().max());
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> cells(256);
      for (double& x : cells) x = pick(rng);
      worst = std::max(worst, fd_gradient_check(*problem, cells, 1.0));
    }
  }
  return {worst <= 1e-6, fmt::format("20 controls, worst relative error {:.3e}", worst)};
}

// 5. Invariants on the logs of every run.
Outcome driver_soundness() {
  std::size_t runs = 0, records = 0;
  std::vector<std::string> violations;
  for (Benchmark b : {Benchmark::Heat, Benchmark::Deconv}) {
    const auto problem = make_problem(b, 128);
    for (double alpha : kAlphas) {
      for (auto policy : {RadiusPolicy::DoubleNoReset, RadiusPolicy::ResetOnSuccess}) {
        for (auto init : {InitialControl::Zero, InitialControl::Random}) {
          ExperimentConfig cfg;
          cfg.init = init;
          cfg.seed = runs;
          const auto tr = cfg.trust_region(*problem, alpha, policy);
          const auto res = run(*problem, cfg.initial_control(*problem), tr);
          ++runs;
          records += res.history.size();
          for (const auto& v : testing::audit_run(*problem, res, tr)) {
            violations.push_back(fmt::format("{} alpha={} {}: {}", to_string(b), alpha, to_string(policy), v));
          }
        }
      }
    }
  }
  return {violations.empty(), fmt::format("{} runs, {} records, {} violations{}", runs, records, violations.size(),
                                          violations.empty() ? "" : "; first: " + violations.front())};
}

// 6. No one-move neighbour improves the returned point.
Outcome local_optimality() {
  const DeconvProblem problem(64);
  std::size_t runs = 0, improvable = 0;
  std::string detail;
  for (double alpha : {1e-4, 1e-3}) {
    for (auto policy : {RadiusPolicy::DoubleNoReset, RadiusPolicy::ResetOnSuccess}) {
      const auto tr = TrustRegionConfig::defaults(problem.grid(), problem.labels(), alpha, policy);
      const auto res = run(problem, Control::constant(problem.grid(), problem.labels(), 0), tr);
      ++runs;
      const auto move = testing::best_local_move(problem, res.final_control, alpha);
      const double gain = res.final_objective - move.objective;
      const double tol = 1e-12 * (std::abs(res.final_objective) + 1.0);
      if (gain > tol) {
        ++improvable;
        detail += fmt::format("; alpha={} {}: {} lowers J by {:.3e}", alpha, to_string(policy), move.kind, gain);
      }
    }
  }
  return {improvable == 0, fmt::format("{} runs, {} improvable by one move{}", runs, improvable, detail)};
}

int jobs_from_env() {
  const char* env = std::getenv("SLIP_TR_JOBS");
  if (env == nullptr) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

// 7. Policy comparison over the full alpha list at N = 512.
Outcome policy_comparison() {
  bool pass = true;
  std::string detail;
  for (Benchmark b : {Benchmark::Heat, Benchmark::Deconv}) {
    ExperimentConfig cfg;
    cfg.benchmark = b;
    cfg.n_cells = 512;
    cfg.alphas = kAlphas;
    cfg.jobs = jobs_from_env();
    const auto runs = run_sweep_detailed(cfg);
    std::vector<ExperimentRow> rows;
    std::size_t audit_violations = 0;
    for (const auto& r : runs) {
      rows.push_back(r.row);
      const auto problem = make_problem(b, cfg.n_cells);
      audit_violations += testing::audit_run(*problem, r.result, cfg.trust_region(*problem, r.row.alpha, r.row.policy)).size();
    }
    int fewer_solves = 0, faster = 0, close = 0;
    for (const auto& s : summarize(rows)) {
      if (!s.complete) continue;
      fewer_solves += s.iterations_nr <= s.iterations_rt ? 1 : 0;
      faster += s.runtime_improvement > 0.0 ? 1 : 0;
      close += s.objective_gap <= 0.10 ? 1 : 0;
      detail += fmt::format("\n    {} alpha={:.0e}: solves NR/RT {}/{}, improvement {:+.1f} %, gap {:+.2f} %", to_string(b),
                            s.alpha, s.iterations_nr, s.iterations_rt, 100.0 * s.runtime_improvement,
                            100.0 * s.objective_gap);
    }
    const bool ok = fewer_solves >= 5 && faster >= 5 && close >= 6 && audit_violations == 0;
    pass = pass && ok;
    detail = fmt::format("\n  {}: (a) fewer solves {}/7, faster {}/7; (b) gap <= 10 % {}/7; log violations {}", to_string(b),
                         fewer_solves, faster, close, audit_violations) + detail;
  }
  return {pass, detail};
}

// 8. Summary arithmetic on the reference row.
Outcome summary_arithmetic() {
  const std::vector<ExperimentRow> rows{{1e-6, RadiusPolicy::DoubleNoReset, 295.5, 1.0, 1, 1, 0.0, 0},
                                        {1e-6, RadiusPolicy::ResetOnSuccess, 905.4, 1.0, 1, 1, 0.0, 0}};
  const auto s = summarize(rows);
  const std::string shown = s.size() == 1 ? fmt::format("{:.1f}", 100.0 * s[0].runtime_improvement) : "?";
  const bool in_markdown = summary_markdown(s).find("67.4 %") != std::string::npos;
  return {shown == "67.4" && in_markdown && s[0].objective_gap == 0.0,
          fmt::format("(905.4 - 295.5) / 905.4 = {} %", shown)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      fmt::print(stderr, "usage: {} [--only N]...\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"subproblem exactness", subproblem_exactness},
      {"pred properties", pred_properties},
      {"pred lower bound", pred_lower_bound},
      {"gradient correctness", gradient_correctness},
      {"driver soundness", driver_soundness},
      {"local optimality", local_optimality},
      {"policy comparison", policy_comparison},
      {"summary arithmetic", summary_arithmetic},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && only.count(id) == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fmt::print("AC{} {} {} ({:.1f} s): {}\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first, secs, o.detail);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
