#include "slip/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "slip/errors.hpp"

namespace slip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBudgetRounding = 1e-9;
constexpr double kClampTolerance = 1e-12;
constexpr int kMaxLabels = 256;  // pointers are stored as uint8

using Index = std::uint8_t;

void validate(const SubproblemInput& in) {
  const int n = in.w_bar.size();
  if (static_cast<int>(in.cell_means.size()) != n) {
    throw StructuralError("subproblem: " + std::to_string(in.cell_means.size()) +
                          " gradient cell means for " + std::to_string(n) + " cells");
  }
  if (!(in.delta >= 0.0)) throw ConfigError("subproblem: trust-region radius must be >= 0");
  if (!(in.alpha > 0.0) || !std::isfinite(in.alpha)) {
    throw ConfigError("subproblem: alpha must be positive and finite");
  }
  for (double g : in.cell_means) {
    if (!std::isfinite(g)) throw StructuralError("subproblem: non-finite gradient value");
  }
}

// Per-instance tables shared by both DP variants.
struct Tables {
  int n = 0;
  int m = 0;
  std::vector<int> labels;
  std::vector<double> alpha_gap;   // alpha * (label[k] - label[k-1]), k >= 1
  std::vector<double> stage;       // [i * m + k]: h * g_i * (label[k] - w_bar_i)
  std::vector<int> dev;            // [i * m + k]: |label[k] - w_bar_i|
  std::vector<std::int64_t> suffix;  // suffix[i] = sum_{j >= i} max_k dev[j, k]

  explicit Tables(const SubproblemInput& in) {
    const Control& w = in.w_bar;
    n = w.size();
    m = w.labels().size();
    labels.assign(w.labels().values().begin(), w.labels().values().end());
    alpha_gap.assign(static_cast<std::size_t>(m), 0.0);
    for (int k = 1; k < m; ++k) alpha_gap[k] = in.alpha * (labels[k] - labels[k - 1]);
    stage.resize(static_cast<std::size_t>(n) * m);
    dev.resize(static_cast<std::size_t>(n) * m);
    suffix.assign(static_cast<std::size_t>(n) + 1, 0);
    const double h = w.grid().h();
    for (int i = 0; i < n; ++i) {
      const double hg = h * in.cell_means[static_cast<std::size_t>(i)];
      int max_dev = 0;
      for (int k = 0; k < m; ++k) {
        const int d = labels[k] - w[i];
        stage[idx(i, k)] = hg * static_cast<double>(d);
        dev[idx(i, k)] = std::abs(d);
        max_dev = std::max(max_dev, std::abs(d));
      }
      suffix[i] = max_dev;
    }
    for (int i = n - 1; i >= 0; --i) suffix[i] += suffix[i + 1];
  }

  std::size_t idx(int i, int k) const { return static_cast<std::size_t>(i) * m + k; }
};

// ---------------------------------------------------------------------------
// Unconstrained variant: values are (cost, used budget) pairs compared
// lexicographically, so the result is the minimum-budget optimum.

struct CostUsed {
  double cost;
  std::int64_t used;
};

bool better_or_equal(const CostUsed& a, const CostUsed& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.used <= b.used);
}

// out[kp] = min_k in[k] + alpha * |label[k] - label[kp]|, smallest k on ties.
void distance_transform(const Tables& t, std::span<const CostUsed> in, std::span<CostUsed> out,
                        std::span<Index> arg, std::vector<CostUsed>& right,
                        std::vector<Index>& right_arg) {
  const int m = t.m;
  out[0] = in[0];
  arg[0] = 0;
  for (int k = 1; k < m; ++k) {
    const CostUsed cand{out[k - 1].cost + t.alpha_gap[k], out[k - 1].used};
    if (better_or_equal(cand, in[k])) {
      out[k] = cand;
      arg[k] = arg[k - 1];
    } else {
      out[k] = in[k];
      arg[k] = static_cast<Index>(k);
    }
  }
  right[m - 1] = in[m - 1];
  right_arg[m - 1] = static_cast<Index>(m - 1);
  for (int k = m - 2; k >= 0; --k) {
    const CostUsed cand{right[k + 1].cost + t.alpha_gap[k + 1], right[k + 1].used};
    if (better_or_equal(in[k], cand)) {
      right[k] = in[k];
      right_arg[k] = static_cast<Index>(k);
    } else {
      right[k] = cand;
      right_arg[k] = right_arg[k + 1];
    }
  }
  for (int k = 0; k < m; ++k) {
    if (!better_or_equal(out[k], right[k])) {
      out[k] = right[k];
      arg[k] = right_arg[k];
    }
  }
}

std::vector<int> solve_unconstrained(const Tables& t, std::int64_t& used_out) {
  const int n = t.n, m = t.m;
  std::vector<CostUsed> next(static_cast<std::size_t>(m), CostUsed{0.0, 0});
  std::vector<CostUsed> a(static_cast<std::size_t>(m)), cur(static_cast<std::size_t>(m));
  std::vector<CostUsed> right(static_cast<std::size_t>(m));
  std::vector<Index> right_arg(static_cast<std::size_t>(m));
  std::vector<Index> pointers(static_cast<std::size_t>(n) * m, 0);

  for (int i = n - 1; i >= 1; --i) {
    for (int k = 0; k < m; ++k) {
      a[k] = {t.stage[t.idx(i, k)] + next[k].cost, t.dev[t.idx(i, k)] + next[k].used};
    }
    distance_transform(t, a, cur, std::span<Index>(pointers).subspan(t.idx(i, 0), m), right,
                       right_arg);
    std::swap(next, cur);
  }
  int k0 = 0;
  CostUsed best{kInf, 0};
  for (int k = 0; k < m; ++k) {
    const CostUsed c{t.stage[t.idx(0, k)] + next[k].cost, t.dev[t.idx(0, k)] + next[k].used};
    if (c.cost < best.cost || (c.cost == best.cost && c.used < best.used)) {
      best = c;
      k0 = k;
    }
  }
  std::vector<int> ks(static_cast<std::size_t>(n));
  ks[0] = k0;
  for (int i = 1; i < n; ++i) ks[i] = pointers[t.idx(i, ks[i - 1])];
  used_out = best.used;
  return ks;
}

// ---------------------------------------------------------------------------
// Budgeted variant. Layer i holds F_i(kp, r): the optimal cost of cells
// i..n-1 given label index kp in cell i-1 and r units of remaining budget,
// for r in [0, R_i] with R_i = min(B, suffix[i]); larger r clamps to R_i.
// Storage is [kp][r] so every inner loop runs over contiguous r.

struct Layer {
  std::int64_t r_max = 0;
  std::vector<double> values;

  std::size_t stride() const { return static_cast<std::size_t>(r_max) + 1; }
};

class BudgetedDp {
 public:
  BudgetedDp(const Tables& t, std::int64_t budget) : t_(t), budget_(budget) {
    const std::size_t cap = static_cast<std::size_t>(t.m) * (static_cast<std::size_t>(budget) + 1);
    a_.resize(cap);
    left_arg_.resize(cap);
    right_arg_.resize(cap);
  }

  std::int64_t r_max(int i) const { return std::min(budget_, t_.suffix[static_cast<std::size_t>(i)]); }

  Layer zero_layer() const {
    Layer z;
    z.r_max = 0;
    z.values.assign(static_cast<std::size_t>(t_.m), 0.0);
    return z;
  }

  // a_[k][r] = stage(i, k) + next(k, r - dev(i, k)), +inf when r < dev.
  void fill_candidates(int i, const Layer& next, std::int64_t r_hi) {
    const std::size_t stride = static_cast<std::size_t>(r_hi) + 1;
    const std::size_t nstride = next.stride();
    for (int k = 0; k < t_.m; ++k) {
      const std::int64_t d = t_.dev[t_.idx(i, k)];
      const double st = t_.stage[t_.idx(i, k)];
      double* row = a_.data() + static_cast<std::size_t>(k) * stride;
      const double* nrow = next.values.data() + static_cast<std::size_t>(k) * nstride;
      const std::int64_t inf_end = std::min<std::int64_t>(d, r_hi + 1);
      for (std::int64_t r = 0; r < inf_end; ++r) row[r] = kInf;
      const std::int64_t direct_end = std::min<std::int64_t>(r_hi, d + next.r_max);
      for (std::int64_t r = d; r <= direct_end; ++r) row[r] = st + nrow[r - d];
      const double clamped = st + nrow[next.r_max];
      for (std::int64_t r = std::max<std::int64_t>(d, direct_end + 1); r <= r_hi; ++r) {
        row[r] = clamped;
      }
    }
  }

  // Computes layer i from layer i+1. Writes argmin label indices into
  // pointers (m * (R_i + 1) entries) when non-null.
  Layer compute(int i, const Layer& next, Index* pointers) {
    const std::int64_t r_hi = r_max(i);
    const std::size_t stride = static_cast<std::size_t>(r_hi) + 1;
    const int m = t_.m;
    fill_candidates(i, next, r_hi);

    Layer out;
    out.r_max = r_hi;
    out.values.resize(static_cast<std::size_t>(m) * stride);
    double* left = out.values.data();
    double* a = a_.data();
    Index* larg = pointers != nullptr ? pointers : left_arg_.data();
    Index* rarg = right_arg_.data();

    // left sweep: best over k <= kp, preferring the smaller index on ties
    std::copy(a, a + stride, left);
    std::fill(larg, larg + stride, Index{0});
    for (int k = 1; k < m; ++k) {
      const double gap = t_.alpha_gap[k];
      const double* lp = left + (k - 1) * stride;
      const Index* ip = larg + (k - 1) * stride;
      const double* ak = a + k * stride;
      double* lk = left + k * stride;
      Index* ik = larg + k * stride;
      const Index self = static_cast<Index>(k);
      for (std::size_t r = 0; r < stride; ++r) {
        const double cand = lp[r] + gap;
        const bool take = cand <= ak[r];
        lk[r] = take ? cand : ak[r];
        ik[r] = take ? ip[r] : self;
      }
    }
    // right sweep in place over a_: best over k >= kp, preferring self on ties
    std::fill(rarg + (m - 1) * stride, rarg + m * stride, static_cast<Index>(m - 1));
    for (int k = m - 2; k >= 0; --k) {
      const double gap = t_.alpha_gap[k + 1];
      const double* an = a + (k + 1) * stride;
      const Index* in = rarg + (k + 1) * stride;
      double* ak = a + k * stride;
      Index* ik = rarg + k * stride;
      const Index self = static_cast<Index>(k);
      for (std::size_t r = 0; r < stride; ++r) {
        const double cand = an[r] + gap;
        const bool keep = ak[r] <= cand;
        ak[r] = keep ? ak[r] : cand;
        ik[r] = keep ? self : in[r];
      }
    }
    const std::size_t total = static_cast<std::size_t>(m) * stride;
    for (std::size_t q = 0; q < total; ++q) {
      const bool use_left = left[q] <= a[q];
      left[q] = use_left ? left[q] : a[q];
      larg[q] = use_left ? larg[q] : rarg[q];
    }
    return out;
  }

  // Best first-cell choice for every total budget r in [0, B].
  void top(const Layer& first, std::vector<double>& total, std::vector<int>& arg) {
    fill_candidates(0, first, budget_);
    const std::size_t stride = static_cast<std::size_t>(budget_) + 1;
    total.assign(stride, kInf);
    arg.assign(stride, 0);
    for (int k = 0; k < t_.m; ++k) {
      const double* row = a_.data() + static_cast<std::size_t>(k) * stride;
      for (std::size_t r = 0; r < stride; ++r) {
        if (row[r] < total[r]) {
          total[r] = row[r];
          arg[r] = k;
        }
      }
    }
  }

 private:
  const Tables& t_;
  std::int64_t budget_;
  std::vector<double> a_;
  std::vector<Index> left_arg_;
  std::vector<Index> right_arg_;
};

std::vector<int> solve_budgeted(const Tables& t, std::int64_t budget, const DpOptions& options) {
  const int n = t.n, m = t.m;
  BudgetedDp dp(t, budget);

  // pointer storage for layers 1..n-1
  std::size_t pointer_bytes = 0;
  for (int i = 1; i < n; ++i) {
    pointer_bytes += static_cast<std::size_t>(m) * (static_cast<std::size_t>(dp.r_max(i)) + 1);
  }
  const int layers = n - 1;
  int segment = layers;
  if (layers > 0 && pointer_bytes > options.pointer_memory_limit) {
    // checkpoint layers cost 8 bytes per entry, pointers 1: balance both
    segment = std::max(1, static_cast<int>(std::sqrt(8.0 * layers)));
  }
  const int n_segments = layers > 0 ? (layers + segment - 1) / segment : 0;
  auto seg_begin = [&](int s) { return 1 + s * segment; };
  auto seg_end = [&](int s) { return std::min(n, 1 + (s + 1) * segment); };

  std::vector<Layer> checkpoints(static_cast<std::size_t>(n_segments));
  std::vector<Index> seg_pointers;
  std::vector<std::size_t> seg_offsets;

  // Recomputes layers [seg_begin, seg_end) from the layer at seg_end,
  // storing pointers, and returns the layer at seg_begin.
  auto run_segment = [&](int s, const Layer& end_layer) {
    const int lo = seg_begin(s), hi = seg_end(s);
    seg_offsets.assign(static_cast<std::size_t>(hi - lo) + 1, 0);
    for (int i = lo; i < hi; ++i) {
      seg_offsets[i - lo + 1] =
          seg_offsets[i - lo] + static_cast<std::size_t>(m) * (static_cast<std::size_t>(dp.r_max(i)) + 1);
    }
    seg_pointers.resize(seg_offsets.back());
    Layer cur = end_layer;
    for (int i = hi - 1; i >= lo; --i) {
      cur = dp.compute(i, cur, seg_pointers.data() + seg_offsets[i - lo]);
    }
    return cur;
  };

  Layer first = dp.zero_layer();
  if (n_segments == 1) {
    first = run_segment(0, dp.zero_layer());
  } else if (n_segments > 1) {
    Layer cur = dp.zero_layer();
    int s = n_segments - 1;
    for (int i = n - 1; i >= 1; --i) {
      cur = dp.compute(i, cur, nullptr);
      if (i == seg_begin(s)) {
        checkpoints[static_cast<std::size_t>(s)] = cur;
        --s;
      }
    }
    first = checkpoints[0];
  }

  std::vector<double> total;
  std::vector<int> top_arg;
  dp.top(first, total, top_arg);
  // smallest budget that attains the optimal value at full budget
  std::int64_t r_star = budget;
  while (r_star > 0 && total[static_cast<std::size_t>(r_star - 1)] == total[static_cast<std::size_t>(budget)]) {
    --r_star;
  }

  std::vector<int> ks(static_cast<std::size_t>(n));
  ks[0] = top_arg[static_cast<std::size_t>(r_star)];
  std::int64_t remaining = r_star - t.dev[t.idx(0, ks[0])];
  for (int s = 0; s < n_segments; ++s) {
    if (n_segments > 1) {
      const Layer& end_layer =
          (s + 1 < n_segments) ? checkpoints[static_cast<std::size_t>(s + 1)] : dp.zero_layer();
      run_segment(s, end_layer);
    }
    const int lo = seg_begin(s), hi = seg_end(s);
    for (int i = lo; i < hi; ++i) {
      const std::int64_t r = std::min(remaining, dp.r_max(i));
      const std::size_t stride = static_cast<std::size_t>(dp.r_max(i)) + 1;
      const Index* p = seg_pointers.data() + seg_offsets[i - lo];
      ks[i] = p[static_cast<std::size_t>(ks[i - 1]) * stride + static_cast<std::size_t>(r)];
      remaining -= t.dev[t.idx(i, ks[i])];
    }
  }
  if (remaining < 0) throw std::logic_error("solve_tr_dp: budget bookkeeping went negative");
  return ks;
}

double clamp_scale(const SubproblemInput& in) {
  double s = 1.0 + in.alpha * static_cast<double>(tv(in.w_bar));
  for (double g : in.cell_means) s += in.w_bar.grid().h() * std::abs(g);
  return s;
}

SubproblemSolution finish(const SubproblemInput& in, std::vector<int> cells) {
  std::int64_t used = 0;
  for (int i = 0; i < in.w_bar.size(); ++i) used += std::abs(cells[i] - in.w_bar[i]);
  const double value = model_value(in.w_bar, in.cell_means, in.alpha, cells);
  if (value > 0.0) {
    if (value > kClampTolerance * clamp_scale(in)) {
      throw std::logic_error("trust-region model value is positive beyond roundoff");
    }
    return {in.w_bar, 0.0, 0.0, 0};
  }
  return {in.w_bar.with_cells(std::move(cells)), value, -value, used};
}

}  // namespace

std::int64_t budget_units(double delta, const Grid& grid, const LabelSet& labels) {
  const std::int64_t cap = static_cast<std::int64_t>(grid.n_cells()) * labels.span();
  if (!(delta >= 0.0)) throw ConfigError("trust-region radius must be >= 0");
  const double units = delta / grid.h() + kBudgetRounding;
  if (units >= static_cast<double>(cap)) return cap;
  return static_cast<std::int64_t>(std::floor(units));
}

double model_value(const Control& w_bar, std::span<const double> cell_means, double alpha,
                   std::span<const int> v) {
  const double h = w_bar.grid().h();
  double linear = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    linear += (h * cell_means[i]) * static_cast<double>(v[i] - w_bar[static_cast<int>(i)]);
  }
  return linear + alpha * static_cast<double>(tv(v) - tv(w_bar));
}

SubproblemSolution solve_tr_dp(const SubproblemInput& input, const DpOptions& options) {
  validate(input);
  if (input.w_bar.labels().size() > kMaxLabels) {
    throw ConfigError("solve_tr_dp supports at most 256 labels");
  }
  const std::int64_t budget = budget_units(input.delta, input.w_bar.grid(), input.w_bar.labels());
  if (budget == 0) return {input.w_bar, 0.0, 0.0, 0};

  const Tables t(input);
  const std::int64_t effective = std::min(budget, t.suffix[0]);

  std::int64_t used = 0;
  std::vector<int> ks = solve_unconstrained(t, used);
  if (used > effective) ks = solve_budgeted(t, effective, options);

  std::vector<int> cells(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) cells[i] = t.labels[static_cast<std::size_t>(ks[i])];
  return finish(input, std::move(cells));
}

SubproblemSolution solve_tr_bruteforce(const SubproblemInput& input) {
  validate(input);
  const int n = input.w_bar.size();
  const int m = input.w_bar.labels().size();
  if (static_cast<double>(n) * std::log10(static_cast<double>(m)) > 7.0) {
    throw GuardError("solve_tr_bruteforce: |W|^N exceeds 1e7");
  }
  const std::int64_t budget = budget_units(input.delta, input.w_bar.grid(), input.w_bar.labels());
  const auto labels = input.w_bar.labels().values();

  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<int> best = {input.w_bar.cells().begin(), input.w_bar.cells().end()};
  double best_value = kInf;
  std::int64_t best_used = 0;
  // lexicographic order with cell 0 most significant, so the first of equal
  // (value, used) candidates is the lexicographically smallest
  while (true) {
    std::int64_t used = 0;
    for (int i = 0; i < n; ++i) {
      v[i] = labels[static_cast<std::size_t>(idx[i])];
      used += std::abs(v[i] - input.w_bar[i]);
    }
    if (used <= budget) {
      const double value = model_value(input.w_bar, input.cell_means, input.alpha, v);
      if (value < best_value || (value == best_value && used < best_used)) {
        best_value = value;
        best_used = used;
        best = v;
      }
    }
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] == m) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return finish(input, std::move(best));
}

double pred(const Control& w_bar, std::span<const double> cell_means, double delta, double alpha) {
  SubproblemInput in{w_bar, {cell_means.begin(), cell_means.end()}, delta, alpha};
  return solve_tr_dp(in).pred;
}

}  // namespace slip
