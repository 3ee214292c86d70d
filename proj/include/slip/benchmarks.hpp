#pragma once

#include <memory>
#include <span>
#include <vector>

#include "slip/benchmark_data.hpp"
#include "slip/problem.hpp"

namespace slip {

/// Optimal control of the steady heat equation -u'' = w on (0, 1) with
/// homogeneous Dirichlet conditions, discretized with P1 elements:
///
///   F(w) = 1/2 || S w - u_d ||^2_{L^2}.
///
/// The gradient is the P1 adjoint state p solving -p'' = S w - u_d.
class HeatProblem final : public Problem {
 public:
  /// Frozen target from benchmark_data.hpp.
  explicit HeatProblem(int n_cells);
  /// Target given by its values at the n_cells - 1 interior nodes.
  HeatProblem(int n_cells, std::vector<double> target_nodes);
  /// Target u_d = S w, so F(w) = 0.
  static HeatProblem for_target_control(const Control& w);

  double objective_at(std::span<const double> cells) const override;
  Gradient gradient_at(std::span<const double> cells) const override;

  /// P1 state at the interior nodes.
  std::vector<double> solve_state(std::span<const double> cells) const;
  /// ||K u - b|| / ||b|| for the stiffness system of a computed state.
  double state_residual(std::span<const double> cells, std::span<const double> state) const;
  std::span<const double> target() const { return target_; }

 private:
  std::vector<double> load(std::span<const double> cells) const;
  std::vector<double> mass_times(std::span<const double> nodal) const;
  std::vector<double> stiffness_solve(std::vector<double> rhs) const;

  std::vector<double> target_;
  // Thomas factorization of (1/h) tridiag(-1, 2, -1)
  std::vector<double> upper_;
  std::vector<double> pivot_;
};

/// Nodal values at the interior nodes of `grid` of the exact solution of
/// -u'' = w, u(a) = u(b) = 0, for a piecewise-constant w given as plateaus
/// over [grid.a(), grid.b()].
std::vector<double> exact_heat_state(const Grid& grid, std::span<const data::Plateau> plateaus);

/// Signal reconstruction on (-1, 1):
///
///   F(w) = 1/2 sum_q omega_q ((K w)(t_q) - f(t_q))^2,
///
/// with (K w)(t) = int k(t - s) w(s) ds, k a Gaussian, and t_q, omega_q the
/// 5-point Gauss-Legendre nodes and weights of every cell. The cell integrals
/// defining K use the same rule.
class DeconvProblem final : public Problem {
 public:
  explicit DeconvProblem(int n_cells, double kernel_width = data::kDeconvKernelWidth);

  double objective_at(std::span<const double> cells) const override;
  Gradient gradient_at(std::span<const double> cells) const override;

  /// (K w)(t_q) at every observation node.
  std::vector<double> apply_kernel(std::span<const double> cells) const;
  std::span<const double> observation_nodes() const { return nodes_; }
  std::span<const double> observation_weights() const { return weights_; }
  std::span<const double> target_samples() const { return target_; }
  double kernel(double t) const;
  double kernel_width() const { return width_; }

  static double source(double t);

 private:
  std::vector<double> residual(std::span<const double> cells) const;

  double width_;
  int band_;  // |cell offset| beyond which kernel entries are dropped
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> target_;
  // cell_table_[(d + band_) * 5 + m]: weight of cell j in observation
  // (c, m) with d = c - j
  std::vector<double> cell_table_;
  // point_table_[(d + band_ + 1) * 5 + m]: k(t_{c,m} - x_i), d = c - i
  std::vector<double> point_table_;
};

/// 5-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 5> kGaussNodes{-0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
                                                   0.5384693101056830910363144, 0.9061798459386639927976269};
inline constexpr std::array<double, 5> kGaussWeights{0.2369268850561890875142640, 0.4786286704993664680412915,
                                                     0.5688888888888888888888889, 0.4786286704993664680412915,
                                                     0.2369268850561890875142640};

}  // namespace slip
