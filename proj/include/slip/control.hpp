#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace slip {

/// Uniform partition of [a, b] into n_cells cells of width h.
class Grid {
 public:
  Grid(int n_cells, double a, double b);

  int n_cells() const { return n_cells_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double h() const { return h_; }
  double length() const { return b_ - a_; }

  /// Coordinate of interface i, i in [0, n_cells]. Interfaces 0 and n_cells
  /// are the domain boundary.
  double interface(int i) const;
  double cell_midpoint(int i) const;

  bool operator==(const Grid&) const = default;

 private:
  int n_cells_;
  double a_;
  double b_;
  double h_;
};

/// Strictly increasing set of admissible integer control values.
class LabelSet {
 public:
  explicit LabelSet(std::vector<int> values);
  /// {lo, lo + 1, ..., hi}
  static LabelSet range(int lo, int hi);

  std::span<const int> values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  int min() const { return values_.front(); }
  int max() const { return values_.back(); }
  int span() const { return max() - min(); }
  int operator[](int k) const { return values_[static_cast<std::size_t>(k)]; }

  bool contains(int v) const { return index_of(v) >= 0; }
  /// Position of v in values(), or -1.
  int index_of(int v) const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<int> values_;
};

/// Piecewise-constant integer control: one label per grid cell.
class Control {
 public:
  Control(Grid grid, LabelSet labels, std::vector<int> cells);
  static Control constant(const Grid& grid, const LabelSet& labels, int value);

  const Grid& grid() const { return grid_; }
  const LabelSet& labels() const { return labels_; }
  std::span<const int> cells() const { return cells_; }
  int size() const { return static_cast<int>(cells_.size()); }
  int operator[](int i) const { return cells_[static_cast<std::size_t>(i)]; }

  /// Same grid and labels, new cell values (validated).
  Control with_cells(std::vector<int> cells) const;
  std::vector<double> as_real() const;

  bool operator==(const Control&) const = default;

 private:
  Grid grid_;
  LabelSet labels_;
  std::vector<int> cells_;
};

struct SwitchPoint {
  int interface;    // interface index in [1, n_cells - 1]
  double position;  // a + interface * h
  int jump;         // right cell minus left cell, never zero
};

/// Total variation: sum of |jump| over interior interfaces. Exact integer.
std::int64_t tv(const Control& w);
std::int64_t tv(std::span<const int> cells);

/// Number of switching interfaces n(w).
int switch_count(const Control& w);

/// h * sum_i |u_i - v_i|. Throws StructuralError unless grid and labels match.
double l1_distance(const Control& u, const Control& v);

std::vector<SwitchPoint> switch_points(const Control& w);

/// sum over switches of |grad(t_i) * jump_i|. interface_gradient holds one
/// value per interior interface (n_cells - 1 values).
double criticality(const Control& w, std::span<const double> interface_gradient);

/// Room a switch has before it meets a switch of opposite sign (or the
/// boundary) when moved left or right.
struct ShiftWindow {
  SwitchPoint at;
  double left;
  double right;
};
std::vector<ShiftWindow> shift_windows(const Control& w);

/// Delta_a(w) without gradient information: min over switches of the larger
/// of the two windows. A constant control yields the domain length.
double min_opposite_switch_distance(const Control& w);

/// Delta_a(w) along the model-decreasing direction of every switch: right when
/// grad(t_i) * jump_i > 0, left when < 0. Switches with zero gradient offer no
/// decrease and are skipped.
double min_opposite_switch_distance(const Control& w, std::span<const double> interface_gradient);

/// ceil((j0 - f_lower_bound) / alpha): bound on n(w_n) along a descent run
/// whose jumps all have height >= 1. Throws ConfigError if alpha <= 0.
std::int64_t switch_count_bound(double j0, double f_lower_bound, double alpha);

/// sup-norm of the difference quotients of the interface gradient values.
double interface_lipschitz_bound(const Grid& grid, std::span<const double> interface_gradient);

/// Runtime quantities from the convergence analysis.
struct TheoryDiagnostics {
  double delta_a = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  std::int64_t n_max = 0;
  double r_n = 0.0;
  /// c0 * C(w) * Delta - c1 * Delta^2; only meaningful while Delta <= delta_a.
  double pred_lower_bound = 0.0;
  /// pred > 0 and r_n >= 0, which forces acceptance.
  bool certified = false;
};

/// c0 = 1 / (n_max * (max W - min W)).
double pred_bound_c0(std::int64_t n_max, const LabelSet& labels);

}  // namespace slip
