#pragma once

// Shared oracles for unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "slip/driver.hpp"
#include "slip/problem.hpp"

namespace slip::testing {

/// F(w) = sum_i h c_i w_i + offset. The first-order model is exact.
class LinearProblem final : public Problem {
 public:
  LinearProblem(Grid grid, LabelSet labels, std::vector<double> c, double offset = 0.0)
      : Problem(grid, std::move(labels), "linear"), c_(std::move(c)), offset_(offset) {}

  double objective_at(std::span<const double> cells) const override {
    check_size(cells);
    double f = offset_;
    for (std::size_t i = 0; i < cells.size(); ++i) f += grid().h() * c_[i] * cells[i];
    return f;
  }
  Gradient gradient_at(std::span<const double> cells) const override {
    check_size(cells);
    Gradient g{c_, std::vector<double>(c_.size() - 1, 0.0)};
    for (std::size_t i = 0; i + 1 < c_.size(); ++i) g.interface_values[i] = 0.5 * (c_[i] + c_[i + 1]);
    return g;
  }
  double lower_bound() const override {
    double lb = offset_;
    for (double ci : c_) lb += grid().h() * std::min(ci * labels().min(), ci * labels().max());
    return lb;
  }

 private:
  std::vector<double> c_;
  double offset_;
};

/// Violations of the driver invariants found in a run log. Empty when sound.
inline std::vector<std::string> audit_run(const Problem& problem, const SolveResult& result,
                                          const TrustRegionConfig& config) {
  std::vector<std::string> bad;
  auto fail = [&](std::int64_t n, const std::string& what) { bad.push_back("n=" + std::to_string(n) + ": " + what); };
  const auto& h = result.history;
  const double budget = result.initial_objective - problem.lower_bound();
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto& r = h[k];
    if (r.accepted != (r.pred > 0.0 && r.ared >= config.sigma * r.pred)) fail(r.n, "acceptance flag");
    // the final PredZero record has no step to accept
    if (r.pred > 0.0 && r.r_n >= 0.0 && !r.accepted) fail(r.n, "certificate without acceptance");
    if (config.alpha * static_cast<double>(r.tv) > budget * (1.0 + 1e-12) + 1e-15) fail(r.n, "TV budget");
    if (k + 1 < h.size()) {
      const auto& next = h[k + 1];
      if (next.objective > r.objective) fail(r.n, "objective increased");
      if (!r.accepted && next.objective != r.objective) fail(r.n, "rejected step moved");
      if (r.accepted && r.pred > 0.0 && !(next.objective < r.objective)) fail(r.n, "no strict decrease");
      double expected = 0.5 * r.delta;
      if (r.accepted) {
        expected = config.policy == RadiusPolicy::DoubleNoReset ? std::min(2.0 * r.delta, config.delta_max)
                                                                : config.delta0;
      }
      if (next.delta != expected) fail(r.n, "radius update");
    }
  }
  if (!h.empty()) {
    const auto& last = h.back();
    if (result.termination == Termination::PredZero && last.pred != 0.0) fail(last.n, "PredZero with pred > 0");
    if (result.termination == Termination::RadiusBelowMesh && !(result.final_radius < config.delta_min)) {
      fail(last.n, "RadiusBelowMesh above threshold");
    }
  }
  return bad;
}

struct LocalMove {
  std::string kind;
  std::vector<int> cells;
  double objective;
};

/// Best objective over one-move neighbours of w: any single cell set to any
/// other label (inserts or removes switches), every switch shifted by one
/// cell either way, and every plateau merged into its left or right
/// neighbour (removes its switches).
inline LocalMove best_local_move(const Problem& problem, const Control& w, double alpha) {
  const int n = w.size();
  const std::vector<int> base(w.cells().begin(), w.cells().end());
  LocalMove best{"none", base, objective(problem, w, alpha)};
  auto consider = [&](const std::string& kind, std::vector<int> cells) {
    const double j = objective(problem, w.with_cells(cells), alpha);
    if (j < best.objective) best = {kind, std::move(cells), j};
  };
  for (int i = 0; i < n; ++i) {
    for (int v : w.labels().values()) {
      if (v == base[i]) continue;
      auto c = base;
      c[i] = v;
      consider("set cell " + std::to_string(i), std::move(c));
    }
  }
  for (int i = 1; i < n; ++i) {
    if (base[i] == base[i - 1]) continue;
    auto right = base;
    right[i] = base[i - 1];
    consider("shift right at " + std::to_string(i), std::move(right));
    auto left = base;
    left[i - 1] = base[i];
    consider("shift left at " + std::to_string(i), std::move(left));
  }
  for (int lo = 0; lo < n;) {
    int hi = lo;
    while (hi + 1 < n && base[hi + 1] == base[lo]) ++hi;
    for (int side : {-1, 1}) {
      const int nb = side < 0 ? lo - 1 : hi + 1;
      if (nb < 0 || nb >= n) continue;
      auto c = base;
      std::fill(c.begin() + lo, c.begin() + hi + 1, base[nb]);
      consider("merge plateau " + std::to_string(lo), std::move(c));
    }
    lo = hi + 1;
  }
  return best;
}

}  // namespace slip::testing
