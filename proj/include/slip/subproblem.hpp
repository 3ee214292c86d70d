#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slip/control.hpp"

namespace slip {

/// Trust-region subproblem around w_bar:
///
///   min_v  h * sum_i g_i (v_i - w_bar_i) + alpha * (TV(v) - TV(w_bar))
///   s.t.   h * sum_i |v_i - w_bar_i| <= delta,  v_i in W,
///
/// where g_i is the mean of the gradient over cell i.
struct SubproblemInput {
  Control w_bar;
  std::vector<double> cell_means;
  double delta = 0.0;
  double alpha = 1.0;
};

struct SubproblemSolution {
  Control w_star;
  double model_value = 0.0;  // <= 0
  double pred = 0.0;         // -model_value, clamped at 0
  std::int64_t budget_used = 0;  // sum_i |w_star_i - w_bar_i|, units of h
};

struct DpOptions {
  /// Above this many bytes of backtracking pointers the solver stores
  /// checkpoint layers and recomputes segments instead.
  std::size_t pointer_memory_limit = std::size_t{512} << 20;
};

/// Integer budget floor(delta / h + 1e-9), capped at n_cells * (max W - min W).
std::int64_t budget_units(double delta, const Grid& grid, const LabelSet& labels);

/// Model value of candidate cells v. This is the single evaluation both
/// solvers report, so equal solutions give bit-identical values.
double model_value(const Control& w_bar, std::span<const double> cell_means, double alpha,
                   std::span<const int> v);

/// Exact solver: layered dynamic program over (cell, value, used budget).
/// Ties are broken towards smaller used budget, then the lexicographically
/// smallest cell vector.
SubproblemSolution solve_tr_dp(const SubproblemInput& input, const DpOptions& options = {});

/// Enumerates every label vector; refuses (GuardError) when |W|^N > 1e7.
/// Same tie rule as solve_tr_dp.
SubproblemSolution solve_tr_bruteforce(const SubproblemInput& input);

/// Predicted reduction -TR(w_bar, g, delta), clamped at 0.
double pred(const Control& w_bar, std::span<const double> cell_means, double delta, double alpha);

}  // namespace slip
