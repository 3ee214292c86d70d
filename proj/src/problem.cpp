#include "slip/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slip/errors.hpp"

namespace slip {

Problem::Problem(Grid grid, LabelSet labels, std::string name)
    : grid_(grid), labels_(std::move(labels)), name_(std::move(name)) {}

void Problem::check_size(std::span<const double> cells) const {
  if (static_cast<int>(cells.size()) != grid_.n_cells()) {
    throw StructuralError(name_ + ": expected " + std::to_string(grid_.n_cells()) +
                          " cell values, got " + std::to_string(cells.size()));
  }
}

double Problem::objective(const Control& w) const {
  if (!(w.grid() == grid_)) throw StructuralError(name_ + ": control is on a different grid");
  const auto x = w.as_real();
  return objective_at(x);
}

Gradient Problem::gradient(const Control& w) const {
  if (!(w.grid() == grid_)) throw StructuralError(name_ + ": control is on a different grid");
  const auto x = w.as_real();
  return gradient_at(x);
}

double fd_gradient_check(const Problem& problem, std::span<const double> cells, double probe_scale) {
  if (!(probe_scale > 0.0)) throw ConfigError("fd_gradient_check: probe_scale must be positive");
  const Gradient g = problem.gradient_at(cells);
  const double h = problem.grid().h();
  std::vector<double> x(cells.begin(), cells.end());
  double max_err = 0.0;
  double scale = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + probe_scale;
    const double f_plus = problem.objective_at(x);
    x[i] = x0 - probe_scale;
    const double f_minus = problem.objective_at(x);
    x[i] = x0;
    const double fd = (f_plus - f_minus) / (2.0 * probe_scale);
    const double analytic = h * g.cell_means[i];
    max_err = std::max(max_err, std::abs(fd - analytic));
    scale = std::max({scale, std::abs(fd), std::abs(analytic)});
  }
  return max_err / scale;
}

}  // namespace slip
