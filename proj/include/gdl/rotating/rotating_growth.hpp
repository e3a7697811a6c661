#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "gdl/density/point_set.hpp"
#include "gdl/numerics/log_scalar.hpp"
#include "gdl/numerics/precision.hpp"

// Potential with slowly rotating growth direction.
//
// Everything is expressed in (log r, phi): with K = 1 the first annulus
// already starts at |z| = exp(exp(pi)) ~ 1.1e10 and ends beyond the binary64
// range. theta(z) = log log |z| measures how far the ridge has turned.
namespace gdl::rotating {

struct RotatingParams {
  int K = 1;
  int digits = 60;

  void validate() const;
  /// log of the base radius exp(exp(pi K)).
  double base_log_r() const;
};

enum class RegionKind { OnS, P1, P2, P3, BaseDisk };

std::string_view to_string(RegionKind kind);

struct RegionLabel {
  RegionKind kind = RegionKind::BaseDisk;
  std::optional<int> annulus_n;
  std::optional<int> sector_k;
};

/// Angular and theta tolerance for boundary (S) classification.
inline constexpr double kBoundaryTolerance = 1e-14;

template <typename T>
struct GComponents {
  T g1;
  T g2;
  T g3;
};

double theta(double log_r);
/// Evaluated at the caller's MPFR precision.
MpReal theta(const MpReal& log_r);

GComponents<double> g_components(const LogPolarPoint& p, int digits = 60);
GComponents<MpReal> g_components(const MpReal& log_r, const MpReal& phi);

RegionLabel classify(const LogPolarPoint& p, const RotatingParams& params);
RegionLabel classify(const MpReal& log_r, const MpReal& phi, const RotatingParams& params);

/// g1 on P1, g2 on P2, g3 on the rest of the annuli. Throws OutOfDomain in
/// the base disk.
double g(const LogPolarPoint& p, const RotatingParams& params);
MpReal g(const MpReal& log_r, const MpReal& phi, const RotatingParams& params);

/// Integral of g over the circle |z| = exp(log_r); equals 2 |sin theta|.
double angular_mean_g(double log_r, const RotatingParams& params);

/// (pi r^2 / 2 - 4 r^2 / log r) g + 4 r^2 / log r.
LogScalar h(const LogPolarPoint& p, const RotatingParams& params);
/// Same with g replaced by g_j, j in {1, 2, 3}.
LogScalar h_j(const LogPolarPoint& p, int j, const RotatingParams& params);

using MpField = std::function<MpReal(const MpReal& log_r, const MpReal& phi)>;

struct MeanValueDeficit {
  /// (mean over 8 circle points - centre value) / rho^2.
  double normalized_deficit = 0.0;
  /// Round-off level of normalized_deficit.
  double resolution = 0.0;
};

/// Discrete sub-mean-value test on a circle of radius r * 10^(-digits/3).
/// The field is evaluated at digits + 20 significant digits.
MeanValueDeficit mean_value_deficit(const MpField& field, const LogPolarPoint& center, int digits);

/// Normalized deficit of h_j at p; nonnegative certifies local
/// subharmonicity at the probe scale. Throws PrecisionInsufficient when the
/// deficit is below round-off.
double subharmonicity_probe(int j, const LogPolarPoint& p, const RotatingParams& params);

struct SubharmonicitySurvey {
  std::vector<int> K_values;
  std::vector<double> min_deficit;
  std::vector<bool> all_pass;
  /// Smallest tested K from which every probe passes; empty if none.
  std::optional<int> threshold_K;
};

SubharmonicitySurvey subharmonicity_survey(int K_max, int samples_per_K, std::uint64_t seed, int digits);

/// |sin theta(r)| r^2, the zero count the construction predicts.
LogScalar predicted_counting(double log_r, const RotatingParams& params);
/// predicted_counting / (pi r^2).
double predicted_density(double log_r, const RotatingParams& params);

struct AnnulusSample {
  double log_r;
  double phi;
  RegionKind kind;
  double g;
};

/// Grid over the annulus pi n <= theta <= pi (n + 1), uniform in theta and phi.
std::vector<AnnulusSample> sample_annulus(const RotatingParams& params, int annulus_n, int n_theta, int n_phi);

/// CSV `log_r,phi,region_kind,g`.
void write_annulus_csv(std::ostream& out, const std::vector<AnnulusSample>& rows);

}  // namespace gdl::rotating
