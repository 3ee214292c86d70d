#include "slip/driver.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <string>

#include "slip/errors.hpp"

namespace slip {

namespace {

constexpr double kPredZeroTolerance = 1e-12;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(RadiusPolicy policy) {
  return policy == RadiusPolicy::DoubleNoReset ? "DoubleNoReset" : "ResetOnSuccess";
}

RadiusPolicy parse_radius_policy(std::string_view text) {
  const std::string t = lower(text);
  if (t == "nr" || t == "doublenoreset") return RadiusPolicy::DoubleNoReset;
  if (t == "rt" || t == "resetonsuccess") return RadiusPolicy::ResetOnSuccess;
  throw ConfigError("unknown radius policy '" + std::string(text) + "'");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::PredZero: return "PredZero";
    case Termination::RadiusBelowMesh: return "RadiusBelowMesh";
    case Termination::IterationCap: return "IterationCap";
  }
  return "?";
}

TrustRegionConfig TrustRegionConfig::defaults(const Grid& grid, const LabelSet& labels, double alpha,
                                              RadiusPolicy policy) {
  TrustRegionConfig c;
  c.alpha = alpha;
  c.policy = policy;
  c.delta0 = grid.length() * labels.span();
  c.delta_max = c.delta0;
  c.delta_min = grid.h();
  return c;
}

void TrustRegionConfig::validate() const {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("sigma must lie in (0, 1)");
  if (!(delta0 > 0.0) || !std::isfinite(delta0)) throw ConfigError("delta0 must be positive and finite");
  if (!(delta_max >= delta0)) throw ConfigError("delta_max must be >= delta0");
  if (!(delta_min > 0.0)) throw ConfigError("delta_min must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive and finite");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
}

std::int64_t SolveResult::accepted_iterations() const {
  return std::count_if(history.begin(), history.end(), [](const IterationRecord& r) { return r.accepted; });
}

double objective(const Problem& problem, const Control& w, double alpha) {
  return problem.objective(w) + alpha * static_cast<double>(tv(w));
}

double ared(const Problem& problem, const Control& w_bar, const Control& w, double alpha) {
  return objective(problem, w_bar, alpha) - objective(problem, w, alpha);
}

SolveResult run(const Problem& problem, const Control& w0, const TrustRegionConfig& config) {
  config.validate();
  if (!(w0.grid() == problem.grid()) || !(w0.labels() == problem.labels())) {
    throw StructuralError("run: initial control does not match the problem grid and labels");
  }
  using Clock = std::chrono::steady_clock;
  const double alpha = config.alpha;

  Control w = w0;
  double f = problem.objective(w);
  double j = f + alpha * static_cast<double>(tv(w));
  Gradient grad = problem.gradient(w);

  SolveResult result{w0, {}, Termination::IterationCap, j, j, config.delta0, 0};
  result.n_max = switch_count_bound(j, problem.lower_bound(), alpha);
  const double c0 = pred_bound_c0(result.n_max, problem.labels());

  double delta = config.delta0;
  for (std::int64_t n = 0;; ++n) {
    if (n >= config.max_iterations) {
      result.termination = Termination::IterationCap;
      break;
    }
    const auto t0 = Clock::now();
    IterationRecord rec;
    rec.n = n;
    rec.delta = delta;
    rec.objective = j;
    rec.tv = tv(w);
    rec.criticality = criticality(w, grad.interface_values);
    rec.delta_a = min_opposite_switch_distance(w, grad.interface_values);
    rec.c0 = c0;
    rec.c1 = interface_lipschitz_bound(problem.grid(), grad.interface_values);
    rec.n_max = result.n_max;

    SubproblemSolution step = solve_tr_dp({w, grad.cell_means, delta, alpha}, config.dp);
    bool stop = false;
    if (step.pred <= kPredZeroTolerance * (std::abs(j) + 1.0)) {
      rec.pred = 0.0;
      rec.ared = 0.0;
      result.termination = Termination::PredZero;
      stop = true;
    } else {
      rec.pred = step.pred;
      rec.budget_used = step.budget_used;
      const double f_trial = problem.objective(step.w_star);
      const double j_trial = f_trial + alpha * static_cast<double>(tv(step.w_star));
      rec.ared = j - j_trial;
      rec.accepted = rec.ared >= config.sigma * rec.pred;
      if (rec.accepted) {
        w = std::move(step.w_star);
        f = f_trial;
        j = j_trial;
        grad = problem.gradient(w);
        delta = config.policy == RadiusPolicy::DoubleNoReset ? std::min(2.0 * delta, config.delta_max)
                                                             : config.delta0;
      } else {
        delta *= 0.5;
      }
      if (delta < config.delta_min) {
        result.termination = Termination::RadiusBelowMesh;
        stop = true;
      }
    }
    rec.r_n = (1.0 - config.sigma) * rec.pred - std::abs(rec.ared - rec.pred);
    rec.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
    result.history.push_back(rec);
    if (stop) break;
  }
  result.final_control = w;
  result.final_objective = j;
  result.final_radius = delta;
  return result;
}

TheoryDiagnostics diagnostics(const IterationRecord& record, const TrustRegionConfig& config) {
  TheoryDiagnostics d;
  d.delta_a = record.delta_a;
  d.c0 = record.c0;
  d.c1 = record.c1;
  d.n_max = record.n_max;
  d.r_n = (1.0 - config.sigma) * record.pred - std::abs(record.ared - record.pred);
  d.pred_lower_bound = d.c0 * record.criticality * record.delta - d.c1 * record.delta * record.delta;
  d.certified = record.pred > 0.0 && d.r_n >= 0.0;
  return d;
}

}  // namespace slip
