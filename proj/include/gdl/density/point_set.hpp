#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gdl {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Tolerance (in log-modulus and in angle) under which two points coincide.
inline constexpr double kPointTolerance = 1e-12;

/// Maps an angle to [0, 2 pi).
double canonical_angle(double phi);

/// Plane point stored as (log |z|, arg z). The origin has log_r = -inf.
struct LogPolarPoint {
  double log_r = 0.0;
  double phi = 0.0;

  static LogPolarPoint make(double log_r, double phi);
  static LogPolarPoint from_complex(std::complex<double> z);
  static LogPolarPoint origin();

  bool is_origin() const;
  /// Binary64 value; overflows to inf for log_r beyond ~709.
  std::complex<double> to_complex() const;
  LogPolarPoint rotated(double angle) const;

  friend std::partial_ordering operator<=>(const LogPolarPoint&, const LogPolarPoint&) = default;
  friend bool operator==(const LogPolarPoint&, const LogPolarPoint&) = default;
};

/// True when both points agree within kPointTolerance in log modulus and angle.
bool same_point(const LogPolarPoint& a, const LogPolarPoint& b);

/// Finite configuration of distinct points, kept sorted by (log_r, phi).
class PointSet {
 public:
  PointSet() = default;
  /// Sorts the points; throws AlreadyPresent on a repeated point.
  explicit PointSet(std::vector<LogPolarPoint> points, std::string label = {});

  std::span<const LogPolarPoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::string& label() const { return label_; }

  bool contains(const LogPolarPoint& p) const;

 private:
  std::vector<LogPolarPoint> points_;
  std::string label_;
};

/// CSV with header `log_r,phi`, one point per row, 17 significant digits.
void write_point_set_csv(std::ostream& out, const PointSet& set);
PointSet read_point_set_csv(std::istream& in, std::string label = {});

}  // namespace gdl
