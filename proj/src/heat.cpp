#include <algorithm>
#include <cmath>

#include "slip/benchmarks.hpp"
#include "slip/errors.hpp"

namespace slip {

namespace {

Grid heat_grid(int n_cells) { return Grid(n_cells, data::kHeatDomainA, data::kHeatDomainB); }

LabelSet heat_labels() { return LabelSet::range(data::kHeatLabelMin, data::kHeatLabelMax); }

}  // namespace

std::vector<double> exact_heat_state(const Grid& grid, std::span<const data::Plateau> plateaus) {
  const double a = grid.a(), b = grid.b(), len = grid.length();
  std::vector<double> u(static_cast<std::size_t>(grid.n_cells() - 1), 0.0);
  for (int j = 1; j < grid.n_cells(); ++j) {
    const double x = grid.interface(j);
    double acc = 0.0;
    double lo = a;
    for (const auto& p : plateaus) {
      const double hi = std::min(p.end, b);
      if (hi <= lo) continue;
      // Green's function (min(x,y) - a)(b - max(x,y)) / len integrated over [lo, hi]
      double part = 0.0;
      if (lo < x) {
        const double top = std::min(hi, x);
        part += (b - x) * ((top - a) * (top - a) - (lo - a) * (lo - a)) / 2.0;
      }
      if (hi > x) {
        const double bottom = std::max(lo, x);
        part += (x - a) * ((b - bottom) * (b - bottom) - (b - hi) * (b - hi)) / 2.0;
      }
      acc += p.value * part / len;
      lo = hi;
    }
    u[static_cast<std::size_t>(j - 1)] = acc;
  }
  return u;
}

HeatProblem::HeatProblem(int n_cells)
    : HeatProblem(n_cells, exact_heat_state(heat_grid(n_cells), data::kHeatTargetControl)) {}

HeatProblem::HeatProblem(int n_cells, std::vector<double> target_nodes)
    : Problem(heat_grid(n_cells), heat_labels(), "heat"), target_(std::move(target_nodes)) {
  const std::size_t interior = static_cast<std::size_t>(n_cells - 1);
  if (target_.size() != interior) {
    throw StructuralError("heat: target needs one value per interior node");
  }
  const double h = grid().h();
  const double diag = 2.0 / h, off = -1.0 / h;
  upper_.resize(interior);
  pivot_.resize(interior);
  for (std::size_t j = 0; j < interior; ++j) {
    pivot_[j] = j == 0 ? diag : diag - off * upper_[j - 1];
    upper_[j] = off / pivot_[j];
  }
}

HeatProblem HeatProblem::for_target_control(const Control& w) {
  HeatProblem probe(w.grid().n_cells(), std::vector<double>(static_cast<std::size_t>(w.size() - 1), 0.0));
  if (!(w.grid() == probe.grid())) throw StructuralError("heat: control is not on the heat grid");
  auto state = probe.solve_state(w.as_real());
  return HeatProblem(w.size(), std::move(state));
}

std::vector<double> HeatProblem::load(std::span<const double> cells) const {
  const double h = grid().h();
  std::vector<double> b(target_.size());
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = 0.5 * h * (cells[j] + cells[j + 1]);
  return b;
}

std::vector<double> HeatProblem::mass_times(std::span<const double> e) const {
  const double h = grid().h();
  const std::size_t n = e.size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j > 0 ? e[j - 1] : 0.0;
    const double right = j + 1 < n ? e[j + 1] : 0.0;
    out[j] = h / 6.0 * (left + 4.0 * e[j] + right);
  }
  return out;
}

std::vector<double> HeatProblem::stiffness_solve(std::vector<double> rhs) const {
  const double off = -1.0 / grid().h();
  const std::size_t n = rhs.size();
  for (std::size_t j = 0; j < n; ++j) {
    rhs[j] = (j == 0 ? rhs[j] : rhs[j] - off * rhs[j - 1]) / pivot_[j];
  }
  for (std::size_t j = n; j-- > 1;) rhs[j - 1] -= upper_[j - 1] * rhs[j];
  return rhs;
}

std::vector<double> HeatProblem::solve_state(std::span<const double> cells) const {
  check_size(cells);
  return stiffness_solve(load(cells));
}

double HeatProblem::state_residual(std::span<const double> cells, std::span<const double> state) const {
  const auto b = load(cells);
  const double h = grid().h();
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double left = j > 0 ? state[j - 1] : 0.0;
    const double right = j + 1 < b.size() ? state[j + 1] : 0.0;
    const double ku = (2.0 * state[j] - left - right) / h;
    num += (ku - b[j]) * (ku - b[j]);
    den += b[j] * b[j];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double HeatProblem::objective_at(std::span<const double> cells) const {
  auto e = solve_state(cells);
  for (std::size_t j = 0; j < e.size(); ++j) e[j] -= target_[j];
  const auto me = mass_times(e);
  double f = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) f += e[j] * me[j];
  return 0.5 * f;
}

Gradient HeatProblem::gradient_at(std::span<const double> cells) const {
  auto e = solve_state(cells);
  for (std::size_t j = 0; j < e.size(); ++j) e[j] -= target_[j];
  const auto p = stiffness_solve(mass_times(e));

  Gradient g;
  const std::size_t n = cells.size();
  g.cell_means.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? p[i - 1] : 0.0;
    const double right = i + 1 < n ? p[i] : 0.0;
    g.cell_means[i] = 0.5 * (left + right);
  }
  g.interface_values = p;
  return g;
}

}  // namespace slip
