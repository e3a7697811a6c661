#include "gdl/radial/radial_construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gdl/density/density.hpp"
#include "gdl/errors.hpp"
#include "gdl/numerics/parallel.hpp"
#include "gdl/numerics/roots.hpp"

namespace gdl::radial {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// (v^2 - 1) / 2 - log v, with the w = v - 1 series where it cancels.
double phi_excess(double v) {
  const double w = v - 1.0;
  if (std::abs(w) < 0.05) {
    double term = w * w;
    double sum = 0.0;
    for (int n = 2; n < 40; ++n) {
      sum += (n % 2 == 0 ? 1.0 : -1.0) * term / n;
      term *= w;
    }
    return sum + w * w / 2;  // w^2 - w^3 / 3 + w^4 / 4 - ...
  }
  return (v * v - 1.0) / 2.0 - std::log(v);
}

// Index of the last R_k <= t, or -1.
int last_started(double t, const Theorem4aParams& p) {
  const auto it = std::upper_bound(p.R.begin(), p.R.end(), t);
  return static_cast<int>(it - p.R.begin()) - 1;
}

bool inside_gap(double t, int k, const Theorem4aParams& p) {
  return !p.delta || t < *p.delta * p.R[k];
}

// Contribution of gap j to H at t >= R_j.
double gap_H(double t, int j, const Theorem4aParams& p) {
  const double Rj = p.R[j];
  if (!p.delta) return p.a_squared * Rj * Rj;
  const double end = *p.delta * Rj;
  return t < end ? p.beta * (end - t) * (end + t) : 0.0;
}

// int_{R_j}^{min(t, delta R_j)} H_j(s) / s ds.
double gap_integral(double t, int j, const Theorem4aParams& p) {
  const double Rj = p.R[j];
  const double a2 = p.a_squared;
  if (!p.delta) return a2 * Rj * Rj * std::log(t / Rj);
  if (t >= *p.delta * Rj) {
    const double x = std::log(a2);
    return Rj * Rj * a2 / 2.0 * (-std::log1p(-x) - x);
  }
  return a2 * Rj * Rj * std::log(t / Rj) - p.beta * (t - Rj) * (t + Rj) / 2.0;
}

double effective_delta(const Theorem4aParams& p) { return p.delta ? *p.delta : 10.0; }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from(std::uint64_t seed, std::uint64_t salt) {
  return static_cast<double>(splitmix(seed ^ splitmix(salt)) >> 11) * 0x1.0p-53;
}

double log_or_inf(const nlohmann::json& v, double fallback) {
  return v.is_null() ? fallback : v.get<double>();
}

nlohmann::json inf_to_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

std::vector<double> default_schedule(int count) {
  std::vector<double> R;
  double r = 10.0;
  for (int k = 0; k < count; ++k, r *= 100.0) R.push_back(r);
  return R;
}

double solve_a_squared(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidParams("solve_a_squared: beta must lie in [0, 1)");
  if (beta == 0.0) return std::numbers::e;
  return solve_monotone([beta](double t) { return tau(t) - beta; }, 1.0, std::numbers::e, 0.0);
}

Theorem4aParams Theorem4aParams::make(double beta, std::vector<double> R) {
  Theorem4aParams p;
  p.beta = beta;
  p.a_squared = solve_a_squared(beta);
  if (beta > 0.0) p.delta = std::sqrt(p.a_squared / beta);
  p.R = std::move(R);
  p.validate();
  return p;
}

double Theorem4aParams::a() const { return std::sqrt(a_squared); }

void Theorem4aParams::validate() const {
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidParams("Theorem4aParams: beta must lie in [0, 1)");
  if (!(a_squared > 1.0)) throw InvalidParams("Theorem4aParams: a^2 must exceed 1");
  if (R.empty()) throw InvalidParams("Theorem4aParams: empty radius schedule");
  if (!(R.front() > 0.0)) throw InvalidParams("Theorem4aParams: radii must be positive");
  for (std::size_t k = 0; k + 1 < R.size(); ++k) {
    if (!(R[k] < R[k + 1])) throw InvalidParams("Theorem4aParams: radii must increase");
    if (delta && !(*delta * R[k] < R[k + 1])) {
      throw InvalidParams("Theorem4aParams: delta R_k must stay below R_{k+1}");
    }
  }
  if (delta && !(*delta > 1.0)) throw InvalidParams("Theorem4aParams: delta must exceed 1");
}

RadialMeasure build_measure(const Theorem4aParams& params) {
  params.validate();
  RadialMeasure m;
  for (double Rk : params.R) m.atoms.push_back({std::log(Rk), 0.5 * (params.a_squared - params.beta) * Rk});
  if (!params.delta) {
    m.segments.push_back({-kInf, kInf, 0.0});
    return m;
  }
  double start = -kInf;
  for (double Rk : params.R) {
    m.segments.push_back({start, std::log(Rk), params.beta});
    start = std::log(*params.delta * Rk);
    m.segments.push_back({std::log(Rk), start, 0.0});
  }
  m.segments.push_back({start, kInf, params.beta});
  return m;
}

double cumulative_moment(double log_r, const RadialMeasure& m) {
  if (std::isnan(log_r)) throw OutOfRange("cumulative_moment: NaN radius");
  if (log_r == -kInf) return 0.0;
  double total = 0.0;
  for (const auto& s : m.segments) {
    if (s.density == 0.0 || log_r <= s.log_r_start) continue;
    const double hi = std::exp(std::min(log_r, s.log_r_end));
    const double lo = std::exp(s.log_r_start);
    total += s.density * (hi - lo) * (hi + lo);
  }
  for (const auto& a : m.atoms) {
    if (a.log_r <= log_r + 1e-14) total += 2.0 * a.mass * std::exp(a.log_r);
  }
  return total;
}

LogScalar h_radial(double log_r, const RadialMeasure& m) {
  if (std::isnan(log_r) || log_r > 300.0) throw OutOfRange("h_radial: radius outside the covered range");
  if (log_r == -kInf) return LogScalar::zero();
  // Antiderivative of s log(r / s): s^2 / 2 log(r / s) + s^2 / 4.
  const auto G = [log_r](double log_s) {
    if (log_s == -kInf) return 0.0;
    const double s2 = std::exp(2.0 * log_s);
    return s2 / 2.0 * (log_r - log_s) + s2 / 4.0;
  };
  double total = 0.0;
  for (const auto& s : m.segments) {
    if (s.density == 0.0 || log_r <= s.log_r_start) continue;
    total += s.density * (G(std::min(log_r, s.log_r_end)) - G(s.log_r_start));
  }
  for (const auto& a : m.atoms) {
    if (a.log_r < log_r) total += a.mass * std::exp(a.log_r) * (log_r - a.log_r);
  }
  return LogScalar::from_double(2.0 * kPi * total);
}

double H(double t, const Theorem4aParams& params) {
  if (!(t >= 0.0)) throw DomainError("H: t must be nonnegative");
  double total = 0.0;
  for (int j = 0; j <= last_started(t, params); ++j) total += gap_H(t, j, params);
  return total;
}

double moment(double t, const Theorem4aParams& params) { return params.beta * t * t + H(t, params); }

double deficiency(double t, const Theorem4aParams& params) {
  if (!(t >= 0.0)) throw DomainError("deficiency: t must be nonnegative");
  const int k = last_started(t, params);
  double value = 0.0;
  int last_subtracted = k;
  if (k >= 0 && inside_gap(t, k, params)) {
    const double Rk = params.R[k];
    value = kPi * params.a_squared * Rk * Rk * phi_excess(t / (params.a() * Rk));
    last_subtracted = k - 1;
  } else {
    value = kPi * (1.0 - params.beta) * t * t / 2.0;
  }
  double sub = 0.0;
  for (int j = 0; j <= last_subtracted; ++j) sub += gap_integral(t, j, params);
  return value - kPi * sub;
}

double deficiency_slope(double t, const Theorem4aParams& params) {
  if (!(t > 0.0)) throw DomainError("deficiency_slope: t must be positive");
  const int k = last_started(t, params);
  if (k >= 0 && inside_gap(t, k, params)) {
    const double aR = params.a() * params.R[k];
    const double v = t / aR;
    double others = 0.0;
    for (int j = 0; j < k; ++j) others += gap_H(t, j, params);
    return kPi * aR * (v - 1.0 / v) - kPi * others / t;
  }
  return kPi * (1.0 - params.beta) * t - kPi * H(t, params) / t;
}

double remainder_at(int k, const Theorem4aParams& params) {
  if (k < 1 || k > static_cast<int>(params.R.size())) throw DomainError("remainder_at: k out of range");
  return -deficiency(params.a() * params.R[k - 1], params);
}

NonnegativityCheck check_H_nonnegative(const Theorem4aParams& params, int points_per_decade) {
  params.validate();
  const double lo = std::log(params.R.front() / 10.0);
  const double hi = std::log(10.0 * effective_delta(params) * params.R.back());
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / std::numbers::ln10 * points_per_decade));
  NonnegativityCheck c;
  c.min_value = kInf;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
    const double v = H(t, params);
    if (v < c.min_value) {
      c.min_value = v;
      c.argmin = t;
    }
  }
  // Atoms sit exactly on the R_k; probe them and their left limits too.
  for (double Rk : params.R) {
    for (double t : {Rk, std::nextafter(Rk, 0.0)}) {
      const double v = H(t, params);
      if (v < c.min_value) {
        c.min_value = v;
        c.argmin = t;
      }
    }
  }
  c.grid_points = n + 1 + 2 * params.R.size();
  c.pass = c.min_value >= 0.0;
  return c;
}

ConvexityCheck check_deficiency_convex(const Theorem4aParams& params, int points_per_interval, double tol) {
  params.validate();
  ConvexityCheck c;
  c.min_normalized = kInf;
  for (std::size_t k = 0; k < params.R.size(); ++k) {
    const double lo = std::log(params.R[k]);
    const double hi = k + 1 < params.R.size() ? std::log(params.R[k + 1])
                                              : std::log(10.0 * effective_delta(params) * params.R[k]);
    const double step = (hi - lo) / (points_per_interval + 1);
    for (int i = 1; i <= points_per_interval; ++i) {
      const double t = std::exp(lo + step * i);
      const double h = 0.5 * t * (1.0 - std::exp(-step));
      const double d2 = deficiency(t + h, params) - 2.0 * deficiency(t, params) + deficiency(t - h, params);
      c.min_normalized = std::min(c.min_normalized, d2 / (kPi * t * t));
      ++c.grid_points;
    }
  }
  c.pass = c.min_normalized >= -tol;
  return c;
}

PropertiesReport verify_properties(const Theorem4aParams& params) {
  params.validate();
  PropertiesReport r;
  const int n = static_cast<int>(params.R.size());
  const double a2 = params.a_squared;

  // (i)
  for (int k = 1; k <= n; ++k) {
    const double ratio = std::abs(remainder_at(k, params)) / std::log(params.R[k - 1]);
    r.fitted_constant = std::max(r.fitted_constant, ratio);
    if (k >= std::min(3, n)) {
      r.k_values.push_back(k);
      r.remainder_over_log.push_back(ratio);
    }
  }
  const auto [mn, mx] = std::minmax_element(r.remainder_over_log.begin(), r.remainder_over_log.end());
  r.stability_ratio = *mn > 0.0 ? *mx / *mn : kInf;
  r.i_pass = r.stability_ratio <= 1.2;

  // Moving R_k (and everything after it) leaves the remainder at k unchanged
  // when beta > 0,
  // and the construction-aware value matches the generic potential where the
  // latter still has digits to spare.
  r.i_structural_pass = true;
  if (n >= 2) {
    const int k = std::min(3, n);
    Theorem4aParams moved = params;
    for (int j = k - 1; j < n; ++j) moved.R[j] *= 2.0;
    const double base = remainder_at(k, params);
    // Without a gap end (beta = 0) the predecessors keep pulling, linearly in log R_k.
    double shift = 0.0;
    if (!params.delta) {
      for (int j = 0; j < k - 1; ++j) shift += kPi * a2 * params.R[j] * params.R[j] * std::log(2.0);
    }
    r.i_structural_pass = std::abs(remainder_at(k, moved) - base - shift) <= 1e-12 * std::abs(base);
    const RadialMeasure m = build_measure(params);
    const double t = params.a() * params.R[k - 1];
    const double generic = h_radial(std::log(t), m).to_double() - kPi / 2.0 * a2 * params.R[k - 1] * params.R[k - 1];
    r.i_structural_pass = r.i_structural_pass && std::abs(generic - base) <= 1e-6 * std::abs(base);
  }

  // (ii)
  {
    const double lo = std::log(params.R.front());
    const double hi = std::log(10.0 * effective_delta(params) * params.R.back());
    const int steps = static_cast<int>(std::ceil((hi - lo) / std::numbers::ln10 * 2000));
    r.ii_max_excess = -kInf;
    const auto probe = [&](double x) {
      r.ii_max_excess = std::max(r.ii_max_excess, -deficiency(x, params) - r.fitted_constant * std::log(x));
    };
    for (int i = 0; i <= steps; ++i) probe(std::exp(lo + (hi - lo) * i / steps));
    for (double Rk : params.R) probe(params.a() * Rk);
    r.ii_pass = r.ii_max_excess <= 0.0;
  }

  // (iii) minimum of N / t^2 over the last complete gap [R_{n-1}, R_n).
  {
    const double lo = std::log(params.R[std::max(0, n - 2)]);
    const double hi = std::log(params.R[n - 1]);
    r.liminf_estimate = kInf;
    for (int i = 0; i <= 4000; ++i) {
      const double t = std::exp(lo + (hi - lo) * i / 4000.0);
      if (t >= params.R[n - 1]) continue;
      r.liminf_estimate = std::min(r.liminf_estimate, moment(t, params) / (t * t));
    }
    const double left = std::nextafter(params.R[n - 1], 0.0);
    r.liminf_estimate = std::min(r.liminf_estimate, moment(left, params) / (left * left));
    const double tol = params.beta > 0.0 ? 0.02 * params.beta : 0.02;
    r.iii_pass = std::abs(r.liminf_estimate - params.beta) <= tol;
  }

  // (iv) the peaks sit at the R_k; nothing on the grid exceeds them.
  {
    double peak = 0.0;
    for (double Rk : params.R) peak = std::max(peak, moment(Rk, params) / (Rk * Rk));
    const double lo = std::log(params.R.front());
    const double hi = std::log(10.0 * effective_delta(params) * params.R.back());
    const int steps = static_cast<int>(std::ceil((hi - lo) / std::numbers::ln10 * 2000));
    double grid_max = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double t = std::exp(lo + (hi - lo) * i / steps);
      grid_max = std::max(grid_max, moment(t, params) / (t * t));
    }
    const double last = params.R.back();
    r.limsup_estimate = moment(last, params) / (last * last);
    r.iv_pass = grid_max <= peak * (1.0 + 1e-12) && std::abs(r.limsup_estimate - a2) <= 0.02 * a2;
  }
  return r;
}

PointSet atomize(const RadialMeasure& m, std::pair<double, double> window_log_r, std::uint64_t seed,
                 int threads) {
  const auto [lo, hi] = window_log_r;
  if (!(lo < hi) || std::isnan(lo) || !std::isfinite(hi)) {
    throw DomainError("atomize: window must satisfy lo < hi with hi finite");
  }

  // Pieces in radial order: continuous stretches and atoms, each with its
  // mass interval (M0, M1] measured from the inner window edge.
  struct Piece {
    bool atom;
    double t0;
    double t1;
    double density;
    double M0;
    double M1;
  };
  std::vector<Piece> pieces;
  for (const auto& s : m.segments) {
    if (s.density == 0.0) continue;
    const double a = std::max(lo, s.log_r_start);
    const double b = std::min(hi, s.log_r_end);
    if (!(a < b)) continue;
    pieces.push_back({false, std::exp(a), std::exp(b), s.density, 0.0, 0.0});
  }
  for (const auto& at : m.atoms) {
    if (at.log_r > lo && at.log_r <= hi) pieces.push_back({true, std::exp(at.log_r), 0.0, at.mass, 0.0, 0.0});
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) {
    return x.t0 != y.t0 ? x.t0 < y.t0 : x.atom && !y.atom;
  });
  double total = 0.0;
  for (auto& p : pieces) {
    p.M0 = total;
    total += p.atom ? 2.0 * kPi * p.density * p.t0 : kPi * p.density * (p.t1 - p.t0) * (p.t1 + p.t0);
    p.M1 = total;
  }
  if (total < 1.0) throw WindowTooThin("atomize: window carries less than one unit of mass");

  // Point j (1-based) targets mass j - 1/2; a piece owns the targets in (M0, M1].
  const auto first_index = [](double M) { return static_cast<long long>(std::floor(M + 0.5)); };
  std::vector<std::size_t> offset(pieces.size() + 1, 0);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const long long count = std::max(0LL, first_index(pieces[i].M1) - first_index(pieces[i].M0));
    offset[i + 1] = offset[i] + static_cast<std::size_t>(count);
  }
  std::vector<LogPolarPoint> points(offset.back());
  const double golden = kPi * (3.0 - std::sqrt(5.0));

  parallel_for(pieces.size(), threads, [&](std::size_t i) {
    const Piece& p = pieces[i];
    const long long j0 = first_index(p.M0);
    const std::size_t count = offset[i + 1] - offset[i];
    const double phase = kTwoPi * unit_from(seed, i);
    for (std::size_t c = 0; c < count; ++c) {
      const long long j = j0 + static_cast<long long>(c) + 1;
      double t = p.t0;
      double phi = 0.0;
      if (p.atom) {
        phi = (phase + kTwoPi * static_cast<double>(c)) / static_cast<double>(count);
      } else {
        const double target = static_cast<double>(j) - 0.5;
        t = std::sqrt(p.t0 * p.t0 + (target - p.M0) / (kPi * p.density));
        phi = phase + golden * static_cast<double>(j);
      }
      points[offset[i] + c] = LogPolarPoint::make(std::log(t), canonical_angle(phi));
    }
  });
  return PointSet(std::move(points), "atomized");
}

nlohmann::json measure_to_json(const RadialMeasure& m) {
  nlohmann::json j;
  j["segments"] = nlohmann::json::array();
  for (const auto& s : m.segments) {
    j["segments"].push_back(
        {{"log_r_start", inf_to_null(s.log_r_start)}, {"log_r_end", inf_to_null(s.log_r_end)}, {"density", s.density}});
  }
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : m.atoms) j["atoms"].push_back({{"log_r", a.log_r}, {"mass", a.mass}});
  return j;
}

RadialMeasure measure_from_json(const nlohmann::json& j) {
  RadialMeasure m;
  try {
    for (const auto& s : j.at("segments")) {
      m.segments.push_back(
          {log_or_inf(s.at("log_r_start"), -kInf), log_or_inf(s.at("log_r_end"), kInf), s.at("density").get<double>()});
    }
    for (const auto& a : j.at("atoms")) m.atoms.push_back({a.at("log_r").get<double>(), a.at("mass").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("measure_from_json: ") + e.what());
  }
  for (const auto& a : m.atoms) {
    if (!(a.mass > 0.0)) throw ParseError("measure_from_json: atom masses must be positive");
  }
  return m;
}

}  // namespace gdl::radial
