#include "gdl/rotating/rotating_growth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "gdl/errors.hpp"
#include "gdl/numerics/quadrature.hpp"

namespace gdl::rotating {
namespace {

constexpr int kGuardDigits = 10;

// Non-negative representative of n mod 4 in 1..4.
int wrap_sector(int n) {
  const int m = ((n % 4) + 4) % 4;
  return m == 0 ? 4 : m;
}

MpReal to_mp(double x) { return MpReal(x); }

template <typename T>
GComponents<T> components_from_theta(const T& phi, const T& th) {
  using std::cos;
  return {cos(2 * phi), cos(2 * phi - 2 * th), cos(2 * phi - th) * cos(th)};
}

MpReal select_branch(const GComponents<MpReal>& c, RegionKind kind) {
  switch (kind) {
    case RegionKind::P1: return c.g1;
    case RegionKind::P2: return c.g2;
    case RegionKind::P3:
    case RegionKind::OnS: return c.g3;
    case RegionKind::BaseDisk: break;
  }
  throw OutOfDomain("g: point lies in the base disk");
}

// r^2 [(pi/2) g + (4 / log r)(1 - g)], i.e. the potential with g as given.
LogScalar potential_from_g(double log_r, double g_value) {
  const double bracket = std::numbers::pi / 2 * g_value + 4.0 / log_r * (1.0 - g_value);
  if (bracket == 0.0) return LogScalar::zero();
  return LogScalar::from_log(2.0 * log_r + std::log(std::abs(bracket)), bracket > 0 ? 1 : -1);
}

MpReal potential_from_g(const MpReal& log_r, const MpReal& g_value) {
  return exp(2 * log_r) * (mp_pi() / 2 * g_value + 4 / log_r * (1 - g_value));
}

}  // namespace

void RotatingParams::validate() const {
  if (K < 1) throw InvalidParams("RotatingParams: K must be >= 1");
  if (digits < 30) throw InvalidParams("RotatingParams: digits must be >= 30");
}

double RotatingParams::base_log_r() const { return std::exp(std::numbers::pi * K); }

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::OnS: return "S";
    case RegionKind::P1: return "P1";
    case RegionKind::P2: return "P2";
    case RegionKind::P3: return "P3";
    case RegionKind::BaseDisk: return "base";
  }
  return "?";
}

double theta(double log_r) {
  if (!(log_r > 1.0)) throw DomainError("theta: requires |z| > e");
  return std::log(log_r);
}

MpReal theta(const MpReal& log_r) {
  if (!(log_r > 1)) throw DomainError("theta: requires |z| > e");
  return log(log_r);
}

GComponents<double> g_components(const LogPolarPoint& p, int digits) {
  ScopedPrecision guard(digits + kGuardDigits);
  const auto c = g_components(to_mp(p.log_r), to_mp(p.phi));
  return {static_cast<double>(c.g1), static_cast<double>(c.g2), static_cast<double>(c.g3)};
}

GComponents<MpReal> g_components(const MpReal& log_r, const MpReal& phi) {
  return components_from_theta(phi, theta(log_r));
}

RegionLabel classify(const LogPolarPoint& p, const RotatingParams& params) {
  if (p.is_origin()) return {};
  ScopedPrecision guard(params.digits + kGuardDigits);
  return classify(to_mp(p.log_r), to_mp(p.phi), params);
}

RegionLabel classify(const MpReal& log_r, const MpReal& phi, const RotatingParams& params) {
  params.validate();
  const MpReal pi = mp_pi();
  if (!(log_r > 1)) return {};
  const MpReal th = log(log_r);
  const MpReal base = pi * params.K;
  if (th < base - kBoundaryTolerance) return {};

  const MpReal x = th / pi;
  const int n = static_cast<int>(floor(x));
  if (th - pi * n < kBoundaryTolerance) return {RegionKind::OnS, n, std::nullopt};
  if (pi * (n + 1) - th < kBoundaryTolerance) return {RegionKind::OnS, n + 1, std::nullopt};

  const MpReal two_pi = 2 * pi;
  MpReal psi = fmod(phi - th / 2, two_pi);
  if (psi < 0) psi += two_pi;
  const MpReal quarter = pi / 2;
  int s = static_cast<int>(floor(psi / quarter));
  s = std::clamp(s, 0, 3);
  const MpReal below = psi - quarter * s;
  const MpReal above = quarter * (s + 1) - psi;
  if (below < kBoundaryTolerance || above < kBoundaryTolerance) {
    return {RegionKind::OnS, n, std::nullopt};
  }

  const int k = s == 0 ? 4 : s;
  RegionKind kind = RegionKind::P3;
  if (k == wrap_sector(3 - n)) {
    kind = RegionKind::P1;
  } else if (k == wrap_sector(n)) {
    kind = RegionKind::P2;
  }
  return {kind, n, k};
}

double g(const LogPolarPoint& p, const RotatingParams& params) {
  if (p.is_origin()) throw OutOfDomain("g: point lies in the base disk");
  ScopedPrecision guard(params.digits + kGuardDigits);
  return static_cast<double>(g(to_mp(p.log_r), to_mp(p.phi), params));
}

MpReal g(const MpReal& log_r, const MpReal& phi, const RotatingParams& params) {
  const RegionLabel label = classify(log_r, phi, params);
  if (label.kind == RegionKind::BaseDisk) throw OutOfDomain("g: point lies in the base disk");
  return select_branch(g_components(log_r, phi), label.kind);
}

double angular_mean_g(double log_r, const RotatingParams& params) {
  params.validate();
  if (log_r < params.base_log_r() * (1 - 1e-15)) throw OutOfDomain("angular_mean_g: radius inside the base disk");
  ScopedPrecision guard(params.digits + kGuardDigits);
  const MpReal lr = to_mp(log_r);
  const double th = static_cast<double>(theta(lr));

  std::vector<double> splits;
  for (int k = 0; k < 4; ++k) splits.push_back(canonical_angle(th / 2 + std::numbers::pi * k / 2));
  splits.push_back(canonical_angle(th));

  QuadOptions options;
  options.rel_tol = 1e-13;
  options.abs_floor = 1e-13;
  const auto integrand = [&](double phi) { return static_cast<double>(g(lr, to_mp(phi), params)); };
  return adaptive_quad(integrand, 0.0, kTwoPi, options, splits).value;
}

LogScalar h(const LogPolarPoint& p, const RotatingParams& params) {
  return potential_from_g(p.log_r, g(p, params));
}

LogScalar h_j(const LogPolarPoint& p, int j, const RotatingParams& params) {
  params.validate();
  if (j < 1 || j > 3) throw DomainError("h_j: j must be 1, 2 or 3");
  if (p.is_origin() || p.log_r <= 1.0) throw OutOfDomain("h_j: requires |z| > e");
  const auto c = g_components(p, params.digits);
  const double gj = j == 1 ? c.g1 : (j == 2 ? c.g2 : c.g3);
  return potential_from_g(p.log_r, gj);
}

MeanValueDeficit mean_value_deficit(const MpField& field, const LogPolarPoint& center, int digits) {
  if (center.is_origin()) throw DomainError("mean_value_deficit: centre must not be the origin");
  ScopedPrecision guard(digits + 20);
  const MpReal lr = to_mp(center.log_r);
  const MpReal ph = to_mp(center.phi);
  const MpReal eps = pow(MpReal(10), -MpReal(digits) / 3);

  const MpReal centre_value = field(lr, ph);
  MpReal sum = 0;
  MpReal magnitude = abs(centre_value);
  constexpr int kPoints = 8;
  const MpReal pi = mp_pi();
  for (int m = 0; m < kPoints; ++m) {
    // z + rho e^{i psi} in log-polar form, with rho = eps |z| and alpha = psi - phi.
    const MpReal alpha = 2 * pi * m / kPoints - ph;
    const MpReal c = cos(alpha);
    const MpReal s = sin(alpha);
    const MpReal lr_m = lr + log1p(2 * eps * c + eps * eps) / 2;
    const MpReal ph_m = ph + atan2(eps * s, 1 + eps * c);
    const MpReal v = field(lr_m, ph_m);
    sum += v;
    magnitude = max(magnitude, MpReal(abs(v)));
  }
  const MpReal rho2 = exp(2 * lr) * eps * eps;
  const MpReal deficit = (sum / kPoints - centre_value) / rho2;
  const MpReal resolution = 64 * magnitude * pow(MpReal(10), -MpReal(digits)) / rho2;
  return {static_cast<double>(deficit), static_cast<double>(resolution)};
}

double subharmonicity_probe(int j, const LogPolarPoint& p, const RotatingParams& params) {
  params.validate();
  if (j < 1 || j > 3) throw DomainError("subharmonicity_probe: j must be 1, 2 or 3");
  if (p.is_origin() || p.log_r <= 1.0) throw OutOfDomain("subharmonicity_probe: requires |z| > e");
  const MpField field = [j](const MpReal& lr, const MpReal& ph) {
    const auto c = g_components(lr, ph);
    const MpReal& gj = j == 1 ? c.g1 : (j == 2 ? c.g2 : c.g3);
    return potential_from_g(lr, gj);
  };
  const MeanValueDeficit d = mean_value_deficit(field, p, params.digits);
  if (std::abs(d.normalized_deficit) <= d.resolution) {
    throw PrecisionInsufficient("subharmonicity_probe: deficit below round-off; raise digits");
  }
  return d.normalized_deficit;
}

SubharmonicitySurvey subharmonicity_survey(int K_max, int samples_per_K, std::uint64_t seed, int digits) {
  SubharmonicitySurvey survey;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int K = 1; K <= K_max; ++K) {
    const RotatingParams params{K, digits};
    double worst = std::numeric_limits<double>::infinity();
    bool pass = true;
    for (int s = 0; s < samples_per_K; ++s) {
      const double th = std::numbers::pi * (K + 0.02 + 0.96 * unit(rng));
      const LogPolarPoint p = LogPolarPoint::make(std::exp(th), kTwoPi * unit(rng));
      for (int j = 1; j <= 3; ++j) {
        double d = 0.0;
        try {
          d = subharmonicity_probe(j, p, params);
        } catch (const PrecisionInsufficient&) {
          d = 0.0;
          pass = false;
        }
        worst = std::min(worst, d);
        if (d < 0) pass = false;
      }
    }
    survey.K_values.push_back(K);
    survey.min_deficit.push_back(worst);
    survey.all_pass.push_back(pass);
  }
  for (std::size_t i = survey.K_values.size(); i-- > 0;) {
    if (!survey.all_pass[i]) break;
    survey.threshold_K = survey.K_values[i];
  }
  return survey;
}

LogScalar predicted_counting(double log_r, const RotatingParams& params) {
  params.validate();
  if (log_r < params.base_log_r() * (1 - 1e-15)) throw DomainError("predicted_counting: radius inside the base disk");
  ScopedPrecision guard(params.digits + kGuardDigits);
  const double s = std::abs(static_cast<double>(sin(theta(to_mp(log_r)))));
  if (s == 0.0) return LogScalar::zero();
  return LogScalar::from_log(2.0 * log_r + std::log(s));
}

double predicted_density(double log_r, const RotatingParams& params) {
  const LogScalar n = predicted_counting(log_r, params);
  if (n.is_zero()) return 0.0;
  return std::exp(n.log_abs() - 2.0 * log_r) / std::numbers::pi;
}

std::vector<AnnulusSample> sample_annulus(const RotatingParams& params, int annulus_n, int n_theta, int n_phi) {
  params.validate();
  if (annulus_n < params.K) throw DomainError("sample_annulus: annulus index below K");
  if (n_theta < 2 || n_phi < 1) throw DomainError("sample_annulus: grid too small");
  std::vector<AnnulusSample> rows;
  rows.reserve(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi));
  ScopedPrecision guard(params.digits + kGuardDigits);
  const MpReal pi = mp_pi();
  for (int i = 0; i < n_theta; ++i) {
    const MpReal th = pi * (annulus_n + MpReal(i) / (n_theta - 1));
    const MpReal lr = exp(th);
    for (int k = 0; k < n_phi; ++k) {
      const MpReal phi = 2 * pi * k / n_phi;
      const RegionLabel label = classify(lr, phi, params);
      const double gv = static_cast<double>(select_branch(g_components(lr, phi), label.kind));
      rows.push_back({static_cast<double>(lr), static_cast<double>(phi), label.kind, gv});
    }
  }
  return rows;
}

void write_annulus_csv(std::ostream& out, const std::vector<AnnulusSample>& rows) {
  out << "log_r,phi,region_kind,g\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g\n", r.log_r, r.phi, to_string(r.kind).data(), r.g);
    out << buf;
  }
}

}  // namespace gdl::rotating
