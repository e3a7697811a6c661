#include "gdl/products/canonical_products.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>

#include "gdl/errors.hpp"
#include "gdl/numerics/parallel.hpp"
#include "gdl/numerics/quadrature.hpp"

namespace gdl::products {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSeriesRadius = 0.25;

// -Re sum_{k>=3} (1 + i^k) w^k / k; at |w| < 1/4 sixty terms reach 1e-36.
double f_series(Complex w) {
  const Complex unit[4] = {{2.0, 0.0}, {1.0, 1.0}, {0.0, 0.0}, {1.0, -1.0}};
  Complex wk = w * w * w;
  double sum = 0.0;
  for (int k = 3; k < 60; ++k) {
    sum -= (unit[k % 4] * wk).real() / k;
    wk *= w;
  }
  return sum;
}

// Mf(s) / s^3 = -2 sum_{k>=3} cos(k pi / 4) s^{k-3} / k.
double mf_over_cube_series(double s) {
  double sk = 1.0;
  double sum = 0.0;
  for (int k = 3; k < 60; ++k) {
    sum -= 2.0 * std::cos(k * kPi / 4.0) * sk / k;
    sk *= s;
  }
  return sum;
}

double mf_over_cube(double s) {
  if (s < kSeriesRadius) return mf_over_cube_series(s);
  return Mf(s) / (s * s * s);
}

// sum_{j > n} j^{-3/2}.
double zeta_tail(std::size_t n) {
  return n == 0 ? 2.6123753486854883 : 2.0 / std::sqrt(static_cast<double>(n));
}

struct Neumaier {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

double safe_log_abs_F(Complex z, const ProductSpec& spec, std::size_t n) {
  try {
    return log_abs_F(z, spec, n).value;
  } catch (const Singularity&) {
    return kNegInf;
  }
}

// Maximum over the circle: coarse scan, then golden section around the best node.
double circle_max(double R, const ProductSpec& spec, std::size_t n, const CertificateOptions& options) {
  const int N = std::max(8, options.coarse_angles);
  std::vector<double> values(static_cast<std::size_t>(N));
  const auto angle = [N](double i) { return kTwoPi * (i + 0.5) / N; };
  parallel_for(values.size(), options.threads, [&](std::size_t i) {
    values[i] = safe_log_abs_F(std::polar(R, angle(static_cast<double>(i))), spec, n);
  });
  const auto best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
  double lo = angle(best - 1.0);
  double hi = angle(best + 1.0);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = safe_log_abs_F(std::polar(R, x1), spec, n);
  double f2 = safe_log_abs_F(std::polar(R, x2), spec, n);
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = safe_log_abs_F(std::polar(R, x2), spec, n);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = safe_log_abs_F(std::polar(R, x1), spec, n);
    }
  }
  return std::max({values[static_cast<std::size_t>(best)], f1, f2});
}

}  // namespace

double f_elem(Complex w) {
  if (std::abs(w) < kSeriesRadius) return f_series(w);
  const Complex iw = Complex(0.0, 1.0) * w;
  const double a = std::abs(1.0 - w);
  const double b = std::abs(1.0 - iw);
  if (a == 0.0 || b == 0.0) throw Singularity("f_elem: argument at a zero of the factor");
  return std::log(a) + std::log(b) + w.real() - w.imag();
}

double Mf(double r) {
  if (r < 0.0) throw DomainError("Mf: r must be nonnegative");
  if (r < kSeriesRadius) return r * r * r * mf_over_cube_series(r);
  return std::log(1.0 - kSqrt2 * r + r * r) + kSqrt2 * r;
}

ProductSpec ProductSpec::extremal(double C, std::size_t count) {
  ProductSpec s;
  s.C = C;
  s.n0 = 1;
  s.envelope_tail = true;
  s.moduli.reserve(count);
  for (std::size_t j = 1; j <= count; ++j) s.moduli.push_back(std::sqrt(static_cast<double>(j) / C));
  s.validate();
  return s;
}

void ProductSpec::validate() const {
  if (!(C > 0.0)) throw InvalidParams("ProductSpec: C must be positive");
  if (n0 < 1) throw InvalidParams("ProductSpec: n0 is 1-based");
  for (std::size_t j = 0; j < moduli.size(); ++j) {
    if (!(moduli[j] > 0.0)) throw InvalidParams("ProductSpec: moduli must be positive");
    if (j > 0 && moduli[j] < moduli[j - 1]) throw InvalidParams("ProductSpec: moduli must be sorted");
    const double n = static_cast<double>(j + 1);
    if (j + 1 >= n0 && moduli[j] < std::sqrt(n / C) * (1.0 - 1e-12)) {
      throw InvalidParams("ProductSpec: modulus below the envelope sqrt(n / C)");
    }
  }
}

LogAbsValue log_abs_F(Complex z, const ProductSpec& spec, std::size_t n_terms) {
  if (n_terms > spec.moduli.size()) throw DomainError("log_abs_F: n_terms exceeds the available moduli");
  const Complex minus_i_z = Complex(0.0, -1.0) * z;
  Neumaier sum;
  for (std::size_t j = 0; j < n_terms; ++j) sum.add(f_elem(minus_i_z / spec.moduli[j]));

  return {sum.value(), tail_bound(std::abs(z), spec, n_terms)};
}

double tail_bound(double abs_z, const ProductSpec& spec, std::size_t n_terms) {
  if (n_terms >= spec.moduli.size() && !spec.envelope_tail) return 0.0;
  constexpr double kUnbounded = std::numeric_limits<double>::infinity();
  // A finite list is bounded term by term; an envelope list only up to n0.
  const std::size_t start = spec.envelope_tail ? std::max(n_terms, spec.n0 - 1) : spec.moduli.size();
  double bound = 0.0;
  for (std::size_t j = n_terms; j < start && j < spec.moduli.size(); ++j) {
    const double s = abs_z / spec.moduli[j];
    if (s > 0.5) return kUnbounded;
    bound += kTailKappa * s * s * s;
  }
  if (!spec.envelope_tail) return bound;
  const double s = std::sqrt(spec.C / static_cast<double>(std::max<std::size_t>(start, 1))) * abs_z;
  if (s > 0.5) return kUnbounded;
  return bound + kTailKappa * std::pow(spec.C, 1.5) * abs_z * abs_z * abs_z * zeta_tail(start);
}

double growth_constant(double rel_tol) {
  QuadOptions options;
  options.rel_tol = rel_tol;
  const auto g = [](double s) { return 2.0 * mf_over_cube(s); };
  const double head = adaptive_quad(g, 0.0, 1.0, options).value;
  const double tail = integrate_to_infinity(g, 1.0, options).value;
  return head + tail;
}

double growth_constant_alternate(double rel_tol) {
  QuadOptions options;
  options.rel_tol = rel_tol;
  const auto g = [](double s) { return kSqrt2 / (1.0 - kSqrt2 * s + s * s); };
  const double head = adaptive_quad(g, 0.0, 1.0, options).value;
  const double tail = integrate_to_infinity(g, 1.0, options).value;
  return head + tail;
}

GrowthReport fock_membership_certificate(const ProductSpec& spec, const std::vector<double>& R_grid,
                                         const CertificateOptions& options) {
  spec.validate();
  GrowthReport report;
  report.R_grid = R_grid;
  std::vector<double> upper;
  for (double R : R_grid) {
    if (!(R > 0.0)) throw DomainError("fock_membership_certificate: radii must be positive");
    const auto wanted = static_cast<std::size_t>(std::ceil(options.terms_factor * spec.C * R * R));
    const std::size_t n = std::min(wanted, spec.moduli.size());
    const double peak = circle_max(R, spec, n, options);
    const double tail = tail_bound(R, spec, n);
    report.slope.push_back(peak / (R * R));
    report.tail_bound.push_back(tail);
    upper.push_back(report.slope.back() + tail / (R * R));
  }
  if (upper.empty()) return report;

  if (upper.size() >= 2) {
    // Least squares for upper = A + B / R.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(upper.size());
    for (std::size_t i = 0; i < upper.size(); ++i) {
      const double x = 1.0 / R_grid[i];
      sx += x;
      sy += upper[i];
      sxx += x * x;
      sxy += x * upper[i];
    }
    const double B = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    report.asymptote = (sy - B * sx) / m;
  } else {
    report.asymptote = upper.front();
  }
  report.margin = kPi / 2.0 - std::max(report.asymptote, upper.back());
  report.in_fock_certified = std::isfinite(report.margin) && report.margin > 0.0;
  return report;
}

void write_growth_csv(std::ostream& out, const GrowthReport& report) {
  out << "R,slope,tail_bound\n";
  char buf[96];
  for (std::size_t i = 0; i < report.R_grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", report.R_grid[i], report.slope[i], report.tail_bound[i]);
    out << buf;
  }
}

JensenReport jensen_verify(const PointSet& zeros, double log_r_probe, double rel_tol) {
  if (!std::isfinite(log_r_probe)) throw DomainError("jensen_verify: probe radius must be finite and positive");
  for (const auto& p : zeros.points()) {
    if (p.is_origin()) throw DomainError("jensen_verify: F(0) = 0 for a zero at the origin");
  }
  const auto clear_of_zeros = [&](double log_r) {
    return std::none_of(zeros.points().begin(), zeros.points().end(),
                        [log_r](const LogPolarPoint& p) { return std::abs(p.log_r - log_r) < 1e-6; });
  };
  double log_r = log_r_probe;
  if (!clear_of_zeros(log_r)) {
    bool found = false;
    for (int m = 0; m <= 20 && !found; ++m) {
      log_r = log_r_probe + std::log1p(std::ldexp(1e-6, m));
      found = clear_of_zeros(log_r);
    }
    if (!found) throw ZeroOnCircle("jensen_verify: no zero-free probe circle within the nudge budget");
  }

  JensenReport report;
  report.r_used = std::exp(log_r);
  double lhs = 0.0;
  for (const auto& p : zeros.points()) {
    if (p.log_r < log_r) lhs += log_r - p.log_r;
  }
  report.lhs = kTwoPi * lhs;

  std::vector<double> splits;
  for (const auto& p : zeros.points()) splits.push_back(p.phi);
  const auto pts = zeros.points();
  const auto integrand = [&](double phi) {
    double total = 0.0;
    for (const auto& p : pts) {
      // |1 - rho e^{ia}|^2 = (1 - rho)^2 + 4 rho sin^2(a / 2), which stays
      // accurate when the zero sits next to the circle.
      const double d = log_r - p.log_r;
      const double rho = std::exp(d);
      const double one_minus = -std::expm1(d);
      const double s = std::sin(0.5 * (phi - p.phi));
      total += 0.5 * std::log(one_minus * one_minus + 4.0 * rho * s * s);
    }
    return total;
  };
  QuadOptions options;
  options.rel_tol = rel_tol;
  options.abs_floor = 1e-13;
  options.max_evaluations = 10'000'000;
  report.rhs = adaptive_quad(integrand, 0.0, kTwoPi, options, splits).value;
  report.gap = report.lhs - report.rhs;
  return report;
}

nlohmann::json to_json(const JensenReport& report) {
  return {{"lhs", report.lhs}, {"rhs", report.rhs}, {"gap", report.gap}, {"r_used", report.r_used}};
}

LogScalar fock_norm_estimate(const std::function<double(Complex)>& log_abs, double R_max,
                             const FockGridOptions& options) {
  if (!(R_max > 0.0)) throw DomainError("fock_norm_estimate: R_max must be positive");
  if (options.nodes_per_cell != 8) throw DomainError("fock_norm_estimate: only 8 nodes per cell are supported");
  if (!(options.cell_width > 0.0) || options.n_angles < 8) throw DomainError("fock_norm_estimate: bad grid options");

  using Gauss8 = boost::math::quadrature::gauss<double, 8>;
  std::vector<double> unit_nodes;
  std::vector<double> unit_weights;
  const auto& x = Gauss8::abscissa();
  const auto& w = Gauss8::weights();
  for (std::size_t i = x.size(); i-- > 0;) {
    unit_nodes.push_back(0.5 - 0.5 * x[i]);
    unit_weights.push_back(0.5 * w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    unit_nodes.push_back(0.5 + 0.5 * x[i]);
    unit_weights.push_back(0.5 * w[i]);
  }

  // Radial cells: a tiny unchecked core disk, geometric cells out to four
  // cell width (log|F| may be singular at the origin), then uniform cells.
  constexpr double kCore = 1e-8;
  std::vector<double> edges{0.0};
  for (double e = kCore; e < std::min(4.0 * options.cell_width, R_max); e *= 1.25) edges.push_back(e);
  for (double e = options.cell_width; e < R_max - 1e-12; e += options.cell_width) {
    if (e > edges.back()) edges.push_back(e);
  }
  edges.push_back(R_max);
  const int N = options.n_angles;
  const double dphi = kTwoPi / N;

  // Rows of log(|F|^2 e^{-pi r^2}); the step test ignores pairs that are
  // negligible against the peak.
  std::vector<std::vector<double>> rows;
  std::vector<double> row_log_weight;
  std::vector<double> row_radius;
  std::size_t core_rows = 0;
  for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
    const double a = edges[c];
    const double b = edges[c + 1];
    for (std::size_t i = 0; i < unit_nodes.size(); ++i) {
      const double r = a + (b - a) * unit_nodes[i];
      std::vector<double> row(static_cast<std::size_t>(N));
      for (int k = 0; k < N; ++k) row[k] = 2.0 * log_abs(std::polar(r, dphi * k)) - kPi * r * r;
      rows.push_back(std::move(row));
      row_radius.push_back(r);
      row_log_weight.push_back(std::log((b - a) * unit_weights[i] * r * dphi));
      if (c == 0) core_rows = rows.size();
    }
  }

  double peak = kNegInf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (double v : rows[i]) peak = std::max(peak, v + row_log_weight[i]);
  }
  constexpr double kNegligible = 40.0;
  const auto check = [&](double u, double v, double lw, double r) {
    if (std::max(u, v) + lw < peak - kNegligible) return;
    if (!(std::abs(u - v) < options.max_log_step)) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "fock_norm_estimate: integrand changes by %.3g between nodes near |z| = %.4g",
                    std::abs(u - v), r);
      throw ResolutionTooCoarse(msg);
    }
  };

  std::vector<LogScalar> terms;
  terms.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const double lw = row_log_weight[i];
    double row_peak = kNegInf;
    for (int k = 0; k < N; ++k) {
      if (i >= core_rows) check(row[k], row[(k + 1) % N], lw, row_radius[i]);
      if (i > core_rows) check(row[k], rows[i - 1][k], lw, row_radius[i]);
      row_peak = std::max(row_peak, row[k]);
    }
    if (row_peak == kNegInf) continue;
    double s = 0.0;
    for (double v : row) s += std::exp(v - row_peak);
    terms.push_back(LogScalar::from_log(row_peak + std::log(s) + lw));
  }
  return log_sum(terms);
}

}  // namespace gdl::products
