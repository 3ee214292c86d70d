#include "slip/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "slip/errors.hpp"

namespace slip {

Grid::Grid(int n_cells, double a, double b) : n_cells_(n_cells), a_(a), b_(b), h_(0.0) {
  if (n_cells < 1) {
    throw StructuralError("grid needs at least one cell, got " + std::to_string(n_cells));
  }
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw StructuralError("grid needs finite endpoints with b > a");
  }
  h_ = (b - a) / n_cells;
}

double Grid::interface(int i) const {
  if (i == n_cells_) return b_;
  return a_ + i * h_;
}

double Grid::cell_midpoint(int i) const { return a_ + (i + 0.5) * h_; }

LabelSet::LabelSet(std::vector<int> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw StructuralError("label set needs at least two values");
  }
  for (std::size_t k = 1; k < values_.size(); ++k) {
    if (values_[k] <= values_[k - 1]) {
      throw StructuralError("label set must be strictly increasing");
    }
  }
}

LabelSet LabelSet::range(int lo, int hi) {
  if (hi <= lo) throw StructuralError("label range needs hi > lo");
  std::vector<int> v;
  v.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int x = lo; x <= hi; ++x) v.push_back(x);
  return LabelSet(std::move(v));
}

int LabelSet::index_of(int v) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), v);
  if (it == values_.end() || *it != v) return -1;
  return static_cast<int>(it - values_.begin());
}

Control::Control(Grid grid, LabelSet labels, std::vector<int> cells)
    : grid_(grid), labels_(std::move(labels)), cells_(std::move(cells)) {
  if (static_cast<int>(cells_.size()) != grid_.n_cells()) {
    throw StructuralError("control has " + std::to_string(cells_.size()) + " cells, grid has " +
                          std::to_string(grid_.n_cells()));
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!labels_.contains(cells_[i])) {
      throw StructuralError("cell " + std::to_string(i) + " value " + std::to_string(cells_[i]) +
                            " is not in the label set");
    }
  }
}

Control Control::constant(const Grid& grid, const LabelSet& labels, int value) {
  return Control(grid, labels, std::vector<int>(static_cast<std::size_t>(grid.n_cells()), value));
}

Control Control::with_cells(std::vector<int> cells) const {
  return Control(grid_, labels_, std::move(cells));
}

std::vector<double> Control::as_real() const { return {cells_.begin(), cells_.end()}; }

std::int64_t tv(std::span<const int> cells) {
  std::int64_t total = 0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    total += std::abs(static_cast<std::int64_t>(cells[i]) - cells[i - 1]);
  }
  return total;
}

std::int64_t tv(const Control& w) { return tv(w.cells()); }

int switch_count(const Control& w) {
  int n = 0;
  for (int i = 1; i < w.size(); ++i) n += (w[i] != w[i - 1]) ? 1 : 0;
  return n;
}

double l1_distance(const Control& u, const Control& v) {
  if (!(u.grid() == v.grid()) || !(u.labels() == v.labels())) {
    throw StructuralError("l1_distance: controls live on different grids or label sets");
  }
  std::int64_t units = 0;
  for (int i = 0; i < u.size(); ++i) units += std::abs(static_cast<std::int64_t>(u[i]) - v[i]);
  return u.grid().h() * static_cast<double>(units);
}

std::vector<SwitchPoint> switch_points(const Control& w) {
  std::vector<SwitchPoint> out;
  for (int i = 1; i < w.size(); ++i) {
    const int jump = w[i] - w[i - 1];
    if (jump != 0) out.push_back({i, w.grid().interface(i), jump});
  }
  return out;
}

namespace {

void check_interface_gradient(const Control& w, std::span<const double> g) {
  if (static_cast<int>(g.size()) != w.size() - 1) {
    throw StructuralError("interface gradient has " + std::to_string(g.size()) +
                          " values, expected " + std::to_string(w.size() - 1));
  }
}

}  // namespace

double criticality(const Control& w, std::span<const double> interface_gradient) {
  check_interface_gradient(w, interface_gradient);
  double c = 0.0;
  for (int i = 1; i < w.size(); ++i) {
    const int jump = w[i] - w[i - 1];
    if (jump != 0) c += std::abs(interface_gradient[static_cast<std::size_t>(i - 1)] * jump);
  }
  return c;
}

std::vector<ShiftWindow> shift_windows(const Control& w) {
  const auto sw = switch_points(w);
  const Grid& grid = w.grid();
  std::vector<ShiftWindow> out;
  out.reserve(sw.size());

  // nearest opposite-sign switch on each side, one pass per direction
  std::vector<double> left(sw.size()), right(sw.size());
  double last_up = grid.a(), last_down = grid.a();
  for (std::size_t k = 0; k < sw.size(); ++k) {
    const double blocker = sw[k].jump > 0 ? last_down : last_up;
    left[k] = sw[k].position - blocker;
    (sw[k].jump > 0 ? last_up : last_down) = sw[k].position;
  }
  double next_up = grid.b(), next_down = grid.b();
  for (std::size_t k = sw.size(); k-- > 0;) {
    const double blocker = sw[k].jump > 0 ? next_down : next_up;
    right[k] = blocker - sw[k].position;
    (sw[k].jump > 0 ? next_up : next_down) = sw[k].position;
  }
  for (std::size_t k = 0; k < sw.size(); ++k) out.push_back({sw[k], left[k], right[k]});
  return out;
}

double min_opposite_switch_distance(const Control& w) {
  double d = w.grid().length();
  for (const auto& win : shift_windows(w)) d = std::min(d, std::max(win.left, win.right));
  return d;
}

double min_opposite_switch_distance(const Control& w, std::span<const double> interface_gradient) {
  check_interface_gradient(w, interface_gradient);
  double d = w.grid().length();
  for (const auto& win : shift_windows(w)) {
    const double slope =
        interface_gradient[static_cast<std::size_t>(win.at.interface - 1)] * win.at.jump;
    if (slope > 0.0) {
      d = std::min(d, win.right);
    } else if (slope < 0.0) {
      d = std::min(d, win.left);
    }
  }
  return d;
}

std::int64_t switch_count_bound(double j0, double f_lower_bound, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("switch_count_bound: alpha must be positive");
  const double margin = j0 - f_lower_bound;
  if (margin <= 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(margin / alpha));
}

double interface_lipschitz_bound(const Grid& grid, std::span<const double> interface_gradient) {
  double m = 0.0;
  for (std::size_t i = 1; i < interface_gradient.size(); ++i) {
    m = std::max(m, std::abs(interface_gradient[i] - interface_gradient[i - 1]));
  }
  return m / grid.h();
}

double pred_bound_c0(std::int64_t n_max, const LabelSet& labels) {
  return 1.0 / (static_cast<double>(std::max<std::int64_t>(n_max, 1)) * labels.span());
}

}  // namespace slip
