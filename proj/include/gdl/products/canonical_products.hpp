#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "gdl/density/point_set.hpp"
#include "gdl/numerics/log_scalar.hpp"

// Genus-2 products over Lambda u i Lambda and their growth.
//
// Each modulus a contributes the zeros a and i a. The quadratic terms of
// the two Weierstrass factors cancel, so log|F(z)| = sum_j f(-i z / a_j) with
// the elementary potential f below.
namespace gdl::products {

using Complex = std::complex<double>;

/// log|1 - w| + log|1 - i w| + Re(w + i w). Throws Singularity at w = 1, -i.
double f_elem(Complex w);

/// max over the circle |w| = r of f: log(1 - sqrt2 r + r^2) + sqrt2 r,
/// attained at arg w = -pi/4.
double Mf(double r);

/// Bound |f(w)| <= kappa |w|^3 and Mf(s) <= kappa s^3 for |w|, s <= 1/2.
inline constexpr double kTailKappa = 16.0 * (0.69314718055994530942 - 0.625);

struct ProductSpec {
  /// Increasing moduli a_j > 0.
  std::vector<double> moduli;
  double C = 0.3;
  /// Envelope a_n >= sqrt(n / C) is assumed from n0 on (1-based).
  std::size_t n0 = 1;
  /// The listed moduli are the head of an infinite sequence obeying the
  /// envelope; otherwise the product is finite.
  bool envelope_tail = false;

  /// a_n = sqrt(n / C), n = 1..count.
  static ProductSpec extremal(double C, std::size_t count);
  void validate() const;
};

struct LogAbsValue {
  double value = 0.0;
  /// Bound on |sum_{j > n_terms} f(-i z / a_j)|; +inf when the envelope
  /// estimate does not apply (sqrt(C / n) |z| > 1/2).
  double tail_bound = 0.0;
};

LogAbsValue log_abs_F(Complex z, const ProductSpec& spec, std::size_t n_terms);

/// Bound on the omitted terms at |z| = abs_z: kappa |w|^3 per term, with
/// sum_{j > n} j^{-3/2} <= 2 / sqrt(n) for the envelope part.
double tail_bound(double abs_z, const ProductSpec& spec, std::size_t n_terms);

/// 2 int_0^inf Mf(s) / s^3 ds = 3 pi / 2.
double growth_constant(double rel_tol = 1e-12);
/// int_0^inf sqrt2 / (1 - sqrt2 s + s^2) ds, the same integral after two
/// integrations by parts.
double growth_constant_alternate(double rel_tol = 1e-12);

struct GrowthReport {
  std::vector<double> R_grid;
  /// max_phi log|F(R e^{i phi})| / R^2 over the partial product.
  std::vector<double> slope;
  std::vector<double> tail_bound;
  /// Limit of slope + tail_bound / R^2 from a fit in 1 / R.
  double asymptote = 0.0;
  /// pi / 2 minus the larger of the asymptote and the last upper slope.
  double margin = 0.0;
  bool in_fock_certified = false;
};

struct CertificateOptions {
  /// n_terms = terms_factor * C * R^2 (capped by the available moduli).
  double terms_factor = 256.0;
  int coarse_angles = 256;
  int threads = 1;
};

GrowthReport fock_membership_certificate(const ProductSpec& spec, const std::vector<double>& R_grid,
                                         const CertificateOptions& options = {});

void write_growth_csv(std::ostream& out, const GrowthReport& report);

struct JensenReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double r_used = 0.0;
};

/// Both sides of Jensen's formula for F = prod (1 - z / lambda). The probe
/// radius moves outward by r (1 + 2^m 1e-6), m = 0..20, while a zero sits
/// within relative distance 1e-6 of the circle.
JensenReport jensen_verify(const PointSet& zeros, double log_r_probe, double rel_tol = 1e-12);

nlohmann::json to_json(const JensenReport& report);

struct FockGridOptions {
  double cell_width = 0.01;
  /// Gauss-Legendre nodes per radial cell (8 supported).
  int nodes_per_cell = 8;
  int n_angles = 2048;
  /// Largest allowed change of 2 log|F| - pi |z|^2 between adjacent nodes.
  double max_log_step = 0.1;
};

/// int_{|z| < R_max} |F|^2 e^{-pi |z|^2} dm over a polar grid, summed in the
/// log domain. Throws ResolutionTooCoarse when the grid under-resolves.
LogScalar fock_norm_estimate(const std::function<double(Complex)>& log_abs, double R_max,
                             const FockGridOptions& options = {});

}  // namespace gdl::products
