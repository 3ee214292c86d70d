#include <algorithm>
#include <cmath>
#include <numbers>

#include "slip/benchmarks.hpp"
#include "slip/errors.hpp"

namespace slip {

namespace {

constexpr int kNodesPerCell = 5;

}  // namespace

double DeconvProblem::source(double t) {
  return 0.2 * std::cos(2.0 * (t - 1.0) * std::numbers::pi - 0.25) * std::exp(t - 1.0);
}

double DeconvProblem::kernel(double t) const {
  return std::exp(-t * t / (2.0 * width_ * width_)) / (width_ * std::sqrt(2.0 * std::numbers::pi));
}

DeconvProblem::DeconvProblem(int n_cells, double kernel_width)
    : Problem(Grid(n_cells, data::kDeconvDomainA, data::kDeconvDomainB),
              LabelSet::range(data::kDeconvLabelMin, data::kDeconvLabelMax), "deconv"),
      width_(kernel_width),
      band_(0) {
  if (!(kernel_width > 0.0)) throw ConfigError("deconv: kernel width must be positive");
  const double h = grid().h();
  const int n = grid().n_cells();
  band_ = std::min(n - 1, static_cast<int>(std::ceil(data::kDeconvKernelCutoff * width_ / h)) + 1);

  const std::size_t n_obs = static_cast<std::size_t>(n) * kNodesPerCell;
  nodes_.resize(n_obs);
  weights_.resize(n_obs);
  target_.resize(n_obs);
  for (int c = 0; c < n; ++c) {
    for (int m = 0; m < kNodesPerCell; ++m) {
      const std::size_t q = static_cast<std::size_t>(c) * kNodesPerCell + m;
      nodes_[q] = grid().a() + h * (c + 0.5 * (1.0 + kGaussNodes[m]));
      weights_[q] = 0.5 * h * kGaussWeights[m];
      target_[q] = source(nodes_[q]);
    }
  }

  // Translation invariance: t_{c,m} - s_{j,m'} = h (c - j + (xi_m - xi_m') / 2).
  const int span = 2 * band_ + 1;
  cell_table_.assign(static_cast<std::size_t>(span) * kNodesPerCell, 0.0);
  for (int d = -band_; d <= band_; ++d) {
    for (int m = 0; m < kNodesPerCell; ++m) {
      double acc = 0.0;
      for (int mm = 0; mm < kNodesPerCell; ++mm) {
        acc += 0.5 * h * kGaussWeights[mm] * kernel(h * (d + 0.5 * (kGaussNodes[m] - kGaussNodes[mm])));
      }
      cell_table_[static_cast<std::size_t>(d + band_) * kNodesPerCell + m] = acc;
    }
  }
  // t_{c,m} - x_i = h (c - i + (1 + xi_m) / 2), c - i in [-band - 1, band]
  point_table_.assign(static_cast<std::size_t>(span + 1) * kNodesPerCell, 0.0);
  for (int d = -band_ - 1; d <= band_; ++d) {
    for (int m = 0; m < kNodesPerCell; ++m) {
      point_table_[static_cast<std::size_t>(d + band_ + 1) * kNodesPerCell + m] =
          kernel(h * (d + 0.5 * (1.0 + kGaussNodes[m])));
    }
  }
}

std::vector<double> DeconvProblem::apply_kernel(std::span<const double> cells) const {
  check_size(cells);
  const int n = grid().n_cells();
  std::vector<double> out(static_cast<std::size_t>(n) * kNodesPerCell, 0.0);
  for (int c = 0; c < n; ++c) {
    double acc[kNodesPerCell] = {};
    const int j_lo = std::max(0, c - band_), j_hi = std::min(n - 1, c + band_);
    for (int j = j_lo; j <= j_hi; ++j) {
      const double wj = cells[static_cast<std::size_t>(j)];
      if (wj == 0.0) continue;
      const double* row = cell_table_.data() + static_cast<std::size_t>(c - j + band_) * kNodesPerCell;
      for (int m = 0; m < kNodesPerCell; ++m) acc[m] += row[m] * wj;
    }
    std::copy(acc, acc + kNodesPerCell, out.begin() + static_cast<std::ptrdiff_t>(c) * kNodesPerCell);
  }
  return out;
}

std::vector<double> DeconvProblem::residual(std::span<const double> cells) const {
  auto r = apply_kernel(cells);
  for (std::size_t q = 0; q < r.size(); ++q) r[q] -= target_[q];
  return r;
}

double DeconvProblem::objective_at(std::span<const double> cells) const {
  const auto r = residual(cells);
  double f = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) f += weights_[q] * r[q] * r[q];
  return 0.5 * f;
}

Gradient DeconvProblem::gradient_at(std::span<const double> cells) const {
  auto z = residual(cells);
  for (std::size_t q = 0; q < z.size(); ++q) z[q] *= weights_[q];
  const int n = grid().n_cells();
  const double h = grid().h();

  Gradient g;
  g.cell_means.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    const int c_lo = std::max(0, j - band_), c_hi = std::min(n - 1, j + band_);
    for (int c = c_lo; c <= c_hi; ++c) {
      const double* row = cell_table_.data() + static_cast<std::size_t>(c - j + band_) * kNodesPerCell;
      const double* zc = z.data() + static_cast<std::size_t>(c) * kNodesPerCell;
      for (int m = 0; m < kNodesPerCell; ++m) acc += row[m] * zc[m];
    }
    g.cell_means[static_cast<std::size_t>(j)] = acc / h;
  }

  g.interface_values.assign(static_cast<std::size_t>(n - 1), 0.0);
  for (int i = 1; i < n; ++i) {
    double acc = 0.0;
    const int c_lo = std::max(0, i - band_ - 1), c_hi = std::min(n - 1, i + band_);
    for (int c = c_lo; c <= c_hi; ++c) {
      const double* row = point_table_.data() + static_cast<std::size_t>(c - i + band_ + 1) * kNodesPerCell;
      const double* zc = z.data() + static_cast<std::size_t>(c) * kNodesPerCell;
      for (int m = 0; m < kNodesPerCell; ++m) acc += row[m] * zc[m];
    }
    g.interface_values[static_cast<std::size_t>(i - 1)] = acc;
  }
  return g;
}

}  // namespace slip
