#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gdl/density/point_set.hpp"
#include "gdl/numerics/log_scalar.hpp"

// Radial Riesz measure whose zero sets reach lower density beta and upper
// density a^2 with tau(a^2) = beta.
//
// nu is a measure in r: background beta dr, switched off on [R_k, delta R_k),
// plus an atom (a^2 - beta) R_k / 2 at each R_k. N(t) = 2 int_0^t s dnu is
// the disk mass divided by pi, so N(t) / t^2 is the density profile.
namespace gdl::radial {

/// R_k = 10 * 100^(k-1), k = 1..count.
std::vector<double> default_schedule(int count = 8);

/// Root of tau(t) = beta on (1, e]; e when beta = 0.
double solve_a_squared(double beta);

struct Theorem4aParams {
  double beta = 0.5;
  double a_squared = 0.0;
  /// a / sqrt(beta); empty when beta = 0.
  std::optional<double> delta;
  std::vector<double> R;

  static Theorem4aParams make(double beta, std::vector<double> R = default_schedule());

  double a() const;
  /// Throws InvalidParams on a bad beta, a non-increasing schedule or
  /// overlapping gaps (delta R_k >= R_{k+1}).
  void validate() const;
};

struct Segment {
  double log_r_start;
  double log_r_end;
  double density;
};

struct Atom {
  double log_r;
  double mass;
};

struct RadialMeasure {
  std::vector<Segment> segments;
  std::vector<Atom> atoms;
};

RadialMeasure build_measure(const Theorem4aParams& params);

// Generic closed forms, valid for any RadialMeasure.

/// N at radius exp(log_r); atoms on the circle are included.
double cumulative_moment(double log_r, const RadialMeasure& m);
/// 2 pi int_0^r s log(r / s) dnu(s). Throws OutOfRange beyond log_r = 300.
LogScalar h_radial(double log_r, const RadialMeasure& m);

// Construction-aware forms. These avoid the cancellation in
// pi t^2 / 2 - h(t), which is total at t ~ 1e15.

/// N(t) - beta t^2.
double H(double t, const Theorem4aParams& params);
/// N(t).
double moment(double t, const Theorem4aParams& params);
/// F(t) = pi t^2 / 2 - h(t).
double deficiency(double t, const Theorem4aParams& params);
/// F'(t).
double deficiency_slope(double t, const Theorem4aParams& params);
/// h(a R_k) - (pi / 2) a^2 R_k^2 for k = 1..R.size() (1-based k).
double remainder_at(int k, const Theorem4aParams& params);

struct NonnegativityCheck {
  double min_value = 0.0;
  double argmin = 0.0;
  std::size_t grid_points = 0;
  bool pass = false;
};

/// H(t) >= 0 on a log grid from R_1 / 10 to 10 delta R_last.
NonnegativityCheck check_H_nonnegative(const Theorem4aParams& params, int points_per_decade = 10000);

struct ConvexityCheck {
  /// Smallest second difference divided by pi t^2.
  double min_normalized = 0.0;
  std::size_t grid_points = 0;
  bool pass = false;
};

/// Second differences of the deficiency on each open gap (R_k, R_{k+1})
/// must be >= -tol pi t^2.
ConvexityCheck check_deficiency_convex(const Theorem4aParams& params, int points_per_interval = 20000,
                                       double tol = 1e-9);

struct PropertiesReport {
  // (i) remainder / log R_k over k = 3..last
  std::vector<int> k_values;
  std::vector<double> remainder_over_log;
  double fitted_constant = 0.0;
  /// max / min of remainder_over_log; stable means <= 1.2.
  double stability_ratio = 0.0;
  bool i_pass = false;
  /// Remainder unchanged when R_k moves with its predecessors fixed.
  bool i_structural_pass = false;
  // (ii) h(x) <= pi x^2 / 2 + C log x with the fitted C
  double ii_max_excess = 0.0;
  bool ii_pass = false;
  // (iii) liminf of N(t) / t^2
  double liminf_estimate = 0.0;
  bool iii_pass = false;
  // (iv) limsup of N(t) / t^2, attained at R_k
  double limsup_estimate = 0.0;
  bool iv_pass = false;
};

PropertiesReport verify_properties(const Theorem4aParams& params);

/// One point per unit of mass pi N over the window, at radius
/// inf{t : mass(t) >= j - 1/2}, so the counting function stays within 1/2
/// of the mass. Points landing on an atom are spread evenly on its circle.
/// Throws WindowTooThin when the window carries less than one unit.
PointSet atomize(const RadialMeasure& m, std::pair<double, double> window_log_r, std::uint64_t seed,
                 int threads = 1);

/// {"segments": [{log_r_start, log_r_end, density}], "atoms": [{log_r, mass}]},
/// with null for infinite endpoints.
nlohmann::json measure_to_json(const RadialMeasure& m);
RadialMeasure measure_from_json(const nlohmann::json& j);

}  // namespace gdl::radial
