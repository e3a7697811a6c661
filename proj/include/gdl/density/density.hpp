#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gdl/density/point_set.hpp"

namespace gdl {

/// Guard band (in log modulus) applied when counting points of an open disk.
inline constexpr double kCountingGuard = 1e-12;

/// Windowed estimate of the upper and lower Beurling densities.
struct DensityReport {
  double upper = 0.0;
  double lower = 0.0;
  std::pair<double, double> window_log_r{0.0, 0.0};
  std::size_t eval_radii_count = 0;
  /// Largest change of upper/lower between the last two dyadic sub-windows.
  double convergence_spread = 0.0;
};

/// Number of points with log modulus below log_r (points on the circle,
/// within kCountingGuard, count as inside).
std::size_t counting(const PointSet& set, double log_r);

/// Extremes of n(r) / (pi r^2) over a geometric radius grid spanning the
/// window with `radii_per_decade` radii per factor of ten.
DensityReport density_report(const PointSet& set, std::pair<double, double> window_log_r,
                             int radii_per_decade);

/// t log(e / t).
double tau(double t);

/// Union of the set with its rotation by pi/2.
PointSet symmetrize(const PointSet& set);

/// Adds and removes finitely many points.
PointSet adjust(const PointSet& set, std::span<const LogPolarPoint> add,
                std::span<const LogPolarPoint> remove);

/// Equally spaced points (phase 0) on circles of the given log radii.
PointSet circle_pack_set(std::span<const double> circle_log_radii, std::span<const long long> counts);

/// Square section {(i s, j s) : max(|i|, |j|) s <= half_width} of s Z^2.
PointSet lattice_section(double spacing, double half_width);

struct TradeoffCheck {
  bool holds = false;
  double gamma_used = 0.0;
  double slack = 0.0;
};

/// Evaluates alpha log(gamma^2) + beta <= gamma^2 at gamma = sqrt(alpha).
TradeoffCheck jensen_tradeoff_check(double alpha, double beta);

/// upper <= e and, when upper > 1, lower <= tau(upper), both up to `tolerance`.
bool sharp_upper_bound_check(const DensityReport& report, double tolerance = 0.02);

}  // namespace gdl
