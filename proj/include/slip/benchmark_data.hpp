#pragma once

// Frozen benchmark data. Bump kBenchmarkDataVersion whenever a value here
// changes; it is written into every sweep output.

#include <array>

namespace slip::data {

inline constexpr int kBenchmarkDataVersion = 1;

/// Value `value` on [previous end, end).
struct Plateau {
  double end;
  int value;
};

// Heat benchmark: domain (0, 1), labels {-2, ..., 23}. The tracking target
// is the exact solution of -u'' = w_target, u(0) = u(1) = 0, for this
// three-plateau control. Breakpoints 0.3 and 0.7 do not fall on dyadic
// grids, so the target is not exactly reachable there.
inline constexpr double kHeatDomainA = 0.0;
inline constexpr double kHeatDomainB = 1.0;
inline constexpr int kHeatLabelMin = -2;
inline constexpr int kHeatLabelMax = 23;
inline constexpr std::array<Plateau, 3> kHeatTargetControl{{{0.3, 4}, {0.7, 20}, {1.0, -2}}};

// Deconvolution benchmark: domain (-1, 1), labels {-2, ..., 2}, Gaussian
// kernel of standard deviation kDeconvKernelWidth, target
// f(t) = 0.2 cos(2 (t - 1) pi - 0.25) exp(t - 1).
inline constexpr double kDeconvDomainA = -1.0;
inline constexpr double kDeconvDomainB = 1.0;
inline constexpr int kDeconvLabelMin = -2;
inline constexpr int kDeconvLabelMax = 2;
inline constexpr double kDeconvKernelWidth = 0.05;
/// Kernel entries beyond this many standard deviations are below 1e-30 of
/// the peak and are dropped.
inline constexpr double kDeconvKernelCutoff = 11.75;

}  // namespace slip::data
