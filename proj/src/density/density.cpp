#include "gdl/density/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gdl/errors.hpp"

namespace gdl {
namespace {

struct Extremes {
  double upper = 0.0;
  double lower = std::numeric_limits<double>::infinity();
};

Extremes extremes_over(const PointSet& set, double lo, double hi, std::size_t steps) {
  Extremes e;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double log_r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
    const double d = static_cast<double>(counting(set, log_r)) * std::exp(-2.0 * log_r) / std::numbers::pi;
    e.upper = std::max(e.upper, d);
    e.lower = std::min(e.lower, d);
  }
  return e;
}

}  // namespace

std::size_t counting(const PointSet& set, double log_r) {
  const auto pts = set.points();
  const double bound = log_r + kCountingGuard;
  auto it = std::lower_bound(pts.begin(), pts.end(), bound,
                             [](const LogPolarPoint& p, double v) { return p.log_r < v; });
  return static_cast<std::size_t>(it - pts.begin());
}

DensityReport density_report(const PointSet& set, std::pair<double, double> window_log_r,
                             int radii_per_decade) {
  const auto [lo, hi] = window_log_r;
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("density_report: window must be a finite interval lo < hi");
  }
  if (radii_per_decade < 10) throw DomainError("density_report: radii_per_decade must be >= 10");

  const double decades = (hi - lo) / std::numbers::ln10;
  const auto steps = static_cast<std::size_t>(std::max(4.0, std::ceil(decades * radii_per_decade)));

  bool populated = false;
  for (std::size_t i = 0; i <= steps && !populated; ++i) {
    const double log_r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
    populated = counting(set, log_r) > 0;
  }
  if (!populated) throw EmptyWindow("density_report: no grid radius encloses a point");

  const Extremes all = extremes_over(set, lo, hi, steps);
  const Extremes half = extremes_over(set, lo + 0.5 * (hi - lo), hi, steps / 2);
  const Extremes quarter = extremes_over(set, lo + 0.75 * (hi - lo), hi, steps / 4);

  DensityReport r;
  r.upper = all.upper;
  r.lower = all.lower;
  r.window_log_r = window_log_r;
  r.eval_radii_count = steps + 1;
  r.convergence_spread = std::max(std::abs(half.upper - quarter.upper), std::abs(half.lower - quarter.lower));
  return r;
}

double tau(double t) {
  if (!(t > 0)) throw DomainError("tau: t must be positive");
  return t * (1.0 - std::log(t));
}

PointSet symmetrize(const PointSet& set) {
  std::vector<LogPolarPoint> merged(set.points().begin(), set.points().end());
  for (const auto& p : set.points()) {
    const LogPolarPoint q = p.rotated(std::numbers::pi / 2);
    if (!set.contains(q)) merged.push_back(q);
  }
  return PointSet(std::move(merged), set.label().empty() ? std::string{} : set.label() + "+i");
}

PointSet adjust(const PointSet& set, std::span<const LogPolarPoint> add,
                std::span<const LogPolarPoint> remove) {
  std::vector<LogPolarPoint> kept;
  kept.reserve(set.size() + add.size());
  std::vector<LogPolarPoint> canon_remove;
  for (const auto& p : remove) {
    const auto q = LogPolarPoint::make(p.log_r, p.phi);
    if (!set.contains(q)) throw NotPresent("adjust: removed point is not in the set");
    canon_remove.push_back(q);
  }
  for (const auto& p : set.points()) {
    const bool drop = std::any_of(canon_remove.begin(), canon_remove.end(),
                                  [&](const auto& q) { return same_point(p, q); });
    if (!drop) kept.push_back(p);
  }
  for (const auto& p : add) {
    const auto q = LogPolarPoint::make(p.log_r, p.phi);
    if (set.contains(q)) throw AlreadyPresent("adjust: added point is already in the set");
    kept.push_back(q);
  }
  // The constructor rejects repeats inside `add`.
  return PointSet(std::move(kept), set.label());
}

PointSet circle_pack_set(std::span<const double> circle_log_radii, std::span<const long long> counts) {
  if (circle_log_radii.size() != counts.size()) {
    throw LengthMismatch("circle_pack_set: radii and counts differ in length");
  }
  std::vector<LogPolarPoint> points;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (k > 0 && !(circle_log_radii[k] > circle_log_radii[k - 1])) {
      throw DomainError("circle_pack_set: radii must be strictly increasing");
    }
    if (counts[k] < 1) throw DomainError("circle_pack_set: counts must be >= 1");
    for (long long j = 0; j < counts[k]; ++j) {
      points.push_back(LogPolarPoint::make(circle_log_radii[k],
                                           kTwoPi * static_cast<double>(j) / static_cast<double>(counts[k])));
    }
  }
  return PointSet(std::move(points), "circlepack");
}

PointSet lattice_section(double spacing, double half_width) {
  if (!(spacing > 0) || !(half_width >= 0)) throw DomainError("lattice_section: need spacing > 0, half_width >= 0");
  const auto m = static_cast<long long>(std::floor(half_width / spacing + 1e-9));
  std::vector<LogPolarPoint> points;
  points.reserve(static_cast<std::size_t>((2 * m + 1) * (2 * m + 1)));
  for (long long i = -m; i <= m; ++i) {
    for (long long j = -m; j <= m; ++j) {
      points.push_back(LogPolarPoint::from_complex({static_cast<double>(i) * spacing, static_cast<double>(j) * spacing}));
    }
  }
  return PointSet(std::move(points), "lattice");
}

TradeoffCheck jensen_tradeoff_check(double alpha, double beta) {
  if (!(alpha > 1) || !(beta >= 0)) throw DomainError("jensen_tradeoff_check: need alpha > 1, beta >= 0");
  const double gamma = std::sqrt(alpha);
  const double g2 = gamma * gamma;
  const double slack = g2 - alpha * std::log(g2) - beta;
  return {slack >= -1e-12, gamma, slack};
}

bool sharp_upper_bound_check(const DensityReport& report, double tolerance) {
  if (report.upper > std::numbers::e + tolerance) return false;
  if (report.upper <= 1.0) return true;
  return report.lower <= tau(report.upper) + tolerance;
}

}  // namespace gdl
