#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "slip/control.hpp"
#include "slip/problem.hpp"
#include "slip/subproblem.hpp"

namespace slip {

/// Radius update after a successful iteration.
enum class RadiusPolicy {
  DoubleNoReset,   // Delta <- min(2 Delta, Delta_max)
  ResetOnSuccess,  // Delta <- Delta_0
};

std::string_view to_string(RadiusPolicy policy);
/// Accepts "nr", "rt", "DoubleNoReset", "ResetOnSuccess" (case-insensitive).
RadiusPolicy parse_radius_policy(std::string_view text);

struct TrustRegionConfig {
  double sigma = 1e-3;
  double delta0 = 1.0;
  double delta_max = 1.0;
  RadiusPolicy policy = RadiusPolicy::DoubleNoReset;
  double alpha = 1e-3;
  double delta_min = 1e-3;
  std::int64_t max_iterations = 1'000'000;
  DpOptions dp{};

  /// Delta_0 = Delta_max = (b - a) * (max W - min W), delta_min = h.
  static TrustRegionConfig defaults(const Grid& grid, const LabelSet& labels, double alpha,
                                    RadiusPolicy policy = RadiusPolicy::DoubleNoReset);
  /// Throws ConfigError on violated invariants.
  void validate() const;
};

struct IterationRecord {
  std::int64_t n = 0;
  double delta = 0.0;
  double pred = 0.0;
  double ared = 0.0;
  bool accepted = false;
  double objective = 0.0;  // J(w_n)
  double criticality = 0.0;
  std::int64_t tv = 0;
  double r_n = 0.0;
  double wall_time = 0.0;  // seconds spent in this iteration
  // theory quantities at w_n
  double delta_a = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  std::int64_t n_max = 0;
  std::int64_t budget_used = 0;
};

enum class Termination { PredZero, RadiusBelowMesh, IterationCap };
std::string_view to_string(Termination t);

struct SolveResult {
  Control final_control;
  std::vector<IterationRecord> history;
  Termination termination = Termination::IterationCap;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double final_radius = 0.0;
  std::int64_t n_max = 0;

  std::int64_t accepted_iterations() const;
};

/// (F(w_bar) + alpha TV(w_bar)) - (F(w) + alpha TV(w)).
double ared(const Problem& problem, const Control& w_bar, const Control& w, double alpha);

/// J(w) = F(w) + alpha TV(w).
double objective(const Problem& problem, const Control& w, double alpha);

/// Trust-region loop. Every iteration solves one subproblem and appends one
/// record. Stops when pred vanishes, when the next radius drops below
/// config.delta_min, or at the iteration cap.
SolveResult run(const Problem& problem, const Control& w0, const TrustRegionConfig& config);

/// Acceptance slack R_n = (1 - sigma) pred_n - |ared_n - pred_n| together
/// with the pred lower bound recorded for the iterate.
TheoryDiagnostics diagnostics(const IterationRecord& record, const TrustRegionConfig& config);

}  // namespace slip
