#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slip/control.hpp"

namespace slip {

/// Gradient of F at a control, in the two forms the algorithm consumes.
struct Gradient {
  /// Mean of grad F over each cell. h * cell_means[i] is the partial
  /// derivative of the discrete F with respect to cell value i.
  std::vector<double> cell_means;
  /// grad F evaluated at the n_cells - 1 interior interfaces.
  std::vector<double> interface_values;
};

/// Smooth part F of the objective J = F + alpha * TV. Evaluations accept
/// real-valued cell vectors so finite-difference checks can leave the label
/// set. Implementations are immutable after construction and reentrant.
class Problem {
 public:
  virtual ~Problem() = default;

  const Grid& grid() const { return grid_; }
  const LabelSet& labels() const { return labels_; }
  std::string_view name() const { return name_; }

  virtual double objective_at(std::span<const double> cells) const = 0;
  virtual Gradient gradient_at(std::span<const double> cells) const = 0;
  /// inf F over all controls (both benchmarks are least-squares, so 0).
  virtual double lower_bound() const { return 0.0; }

  double objective(const Control& w) const;
  Gradient gradient(const Control& w) const;

 protected:
  Problem(Grid grid, LabelSet labels, std::string name);
  void check_size(std::span<const double> cells) const;

 private:
  Grid grid_;
  LabelSet labels_;
  std::string name_;
};

/// Max over cells of |central difference of F - h * cell_mean|, divided by
/// the largest magnitude among the analytic and difference-quotient
/// derivatives. Each cell is perturbed by +-probe_scale.
double fd_gradient_check(const Problem& problem, std::span<const double> cells, double probe_scale);

}  // namespace slip
