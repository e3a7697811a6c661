#include "gdl/fock/fock_probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "gdl/errors.hpp"
#include "gdl/numerics/parallel.hpp"

namespace gdl::fock {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuarterRoot2 = 1.1892071150027210667;
constexpr double kPinvCutoff = 1e-12;
constexpr double kClipRatio = 1e-12;

Eigen::MatrixXcd hermitian_pinv(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > kPinvCutoff * top) inv(i) = 1.0 / ev(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

// Plain product; std::complex operator* pays for inf/nan recovery in the hot loop.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// <k~_a, k~_b> written as exp(-pi |a - b|^2 / 2 + i pi Im(conj(a) b)), which
// keeps the diagonal exactly 1 and the matrix exactly Hermitian.
Complex normalized_inner(Complex a, Complex b) {
  const double im = a.real() * b.imag() - a.imag() * b.real();
  return std::polar(std::exp(-kPi * std::norm(a - b) / 2.0), kPi * im);
}

double checked_residual(double r, const char* what) {
  if (r < -1e-8 || r > 1.0 + 1e-8) throw IllConditioned(what);
  return std::clamp(r, 0.0, 1.0);
}

}  // namespace

double gaussian_window(double t) { return kQuarterRoot2 * std::exp(-kPi * t * t); }

bool SampledSignal::clipped() const {
  if (values.empty()) return false;
  double peak = 0.0;
  for (const auto& v : values) peak = std::max(peak, std::abs(v));
  return std::max(std::abs(values.front()), std::abs(values.back())) > kClipRatio * peak;
}

SampledSignal sample(const std::function<Complex(double)>& f, double t_min, double t_max, std::size_t n) {
  if (!(t_min < t_max) || n < 2) throw DomainError("sample: need t_min < t_max and n >= 2");
  SampledSignal s{t_min, t_max, n, {}};
  s.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s.values.push_back(f(s.t(i)));
  return s;
}

SampledSignal tf_shift(const std::function<Complex(double)>& f, double t0, double w0, double t_min, double t_max,
                       std::size_t n, bool strict) {
  SampledSignal s = sample(
      [&](double x) { return std::polar(1.0, 2.0 * kPi * w0 * x) * f(x - t0); }, t_min, t_max, n);
  if (strict && s.clipped()) throw SupportClipped("tf_shift: shifted signal is not negligible at the grid ends");
  return s;
}

double l2_norm(const SampledSignal& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    const double w = (i == 0 || i + 1 == f.n) ? 0.5 : 1.0;
    sum += w * std::norm(f.values[i]);
  }
  return std::sqrt(sum * f.step());
}

Complex bargmann(const SampledSignal& f, Complex z) {
  if (f.values.size() != f.n || f.n < 2) throw DomainError("bargmann: malformed signal");
  const double h = f.step();
  if (h * std::abs(z.imag()) > 0.25) throw GridInsufficient("bargmann: oscillation under-sampled on the grid");

  // Kernel e^{-pi t^2 + 2 pi t z - pi z^2 / 2} by a two-sided product
  // recurrence from the grid node nearest Re z, where it peaks in modulus.
  const auto exponent = [&](double t) { return -kPi * t * t + 2.0 * kPi * t * z - kPi * z * z / 2.0; };
  const auto start = static_cast<std::size_t>(
      std::clamp(std::llround((z.real() - f.t_min) / h), 0LL, static_cast<long long>(f.n - 1)));
  const double damp = std::exp(-2.0 * kPi * h * h);

  Complex sum = 0.0;
  double peak = 0.0;
  double edge = 0.0;
  const auto accumulate = [&](std::size_t i, Complex kernel) {
    const Complex term = mul(f.values[i], kernel) * ((i == 0 || i + 1 == f.n) ? 0.5 : 1.0);
    sum += term;
    const double m = std::norm(term);
    peak = std::max(peak, m);
    if (i == 0 || i + 1 == f.n) edge = std::max(edge, m);
  };

  const Complex k0 = std::exp(exponent(f.t(start)));
  // Ratio kernel(t + h) / kernel(t) = e^{-pi h (2 t + h) + 2 pi h z}.
  Complex kernel = k0;
  Complex ratio = std::exp(Complex(-kPi * h * (2.0 * f.t(start) + h), 0.0) + 2.0 * kPi * h * z);
  accumulate(start, kernel);
  for (std::size_t i = start + 1; i < f.n; ++i) {
    kernel = mul(kernel, ratio);
    ratio *= damp;
    accumulate(i, kernel);
  }
  kernel = k0;
  // Ratio kernel(t - h) / kernel(t) = e^{pi h (2 t - h) - 2 pi h z}.
  ratio = std::exp(Complex(kPi * h * (2.0 * f.t(start) - h), 0.0) - 2.0 * kPi * h * z);
  for (std::size_t i = start; i-- > 0;) {
    kernel = mul(kernel, ratio);
    ratio *= damp;
    accumulate(i, kernel);
  }
  if (edge > kClipRatio * kClipRatio * peak && edge > 0.0) throw GridInsufficient("bargmann: integrand not negligible at the grid ends");
  return kQuarterRoot2 * h * sum;
}

Complex kernel_eval(Complex lambda, Complex z) { return std::exp(kPi * std::conj(lambda) * z); }

Complex shifted_window_transform(Complex lambda, Complex z) {
  const double t = lambda.real();
  const double w = lambda.imag();
  return std::exp(Complex(-kPi * std::norm(lambda) / 2.0, kPi * t * w) + kPi * lambda * z);
}

GramMatrix build_gram(const std::vector<Complex>& nodes, int threads) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  GramMatrix g{nodes, Eigen::MatrixXcd(n, n)};
  parallel_for(nodes.size(), threads, [&](std::size_t i) {
    const Complex li = nodes[i];
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const Complex lj = nodes[j];
      g.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          normalized_inner(li, lj);
    }
  });
  return g;
}

double min_eigenvalue(const GramMatrix& g) {
  if (g.entries.size() == 0) throw DomainError("min_eigenvalue: empty Gram matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.entries, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void write_gram_csv(std::ostream& out, const GramMatrix& g) {
  out << "i,j,re,im\n";
  char buf[96];
  for (Eigen::Index i = 0; i < g.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.entries.cols(); ++j) {
      const Complex v = g.entries(i, j);
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", static_cast<long>(i), static_cast<long>(j), v.real(),
                    v.imag());
      out << buf;
    }
  }
}

double minimality_residual(const std::vector<Complex>& nodes, std::size_t index) {
  if (nodes.size() < 2) throw DomainError("minimality_residual: need at least two nodes");
  if (index >= nodes.size()) throw DomainError("minimality_residual: index out of range");
  std::vector<Complex> rest;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i != index) rest.push_back(nodes[i]);
  }
  const GramMatrix g = build_gram(rest);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(rest.size()));
  const Complex l = nodes[index];
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const Complex li = rest[i];
    // <k~_index, k~_i>, the coefficient vector of the normal equations.
    b(static_cast<Eigen::Index>(i)) = normalized_inner(l, li);
  }
  const Eigen::MatrixXcd m = g.entries.transpose();
  const double proj = (b.adjoint() * hermitian_pinv(m) * b)(0, 0).real();
  return checked_residual(1.0 - proj, "minimality_residual: projection outside [0, 1]");
}

Complex monomial(int n, Complex z) {
  if (n < 0) throw DomainError("monomial: negative degree");
  if (n == 0) return 1.0;
  if (z == Complex(0.0, 0.0)) return 0.0;
  const double log_mag = n * std::log(std::abs(z)) + 0.5 * (n * std::log(kPi) - std::lgamma(n + 1.0));
  return std::polar(std::exp(log_mag), n * std::arg(z));
}

std::vector<double> completeness_residual(const std::vector<Complex>& nodes, int degree_max) {
  if (nodes.empty()) throw DomainError("completeness_residual: no nodes");
  if (degree_max < 0) throw DomainError("completeness_residual: negative degree");
  const GramMatrix g = build_gram(nodes);
  const Eigen::MatrixXcd pinv = hermitian_pinv(g.entries.transpose());
  std::vector<double> out;
  Eigen::VectorXcd b(static_cast<Eigen::Index>(nodes.size()));
  for (int n = 0; n <= degree_max; ++n) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      // <e_n, k~_i> = e_n(lambda_i) e^{-pi |lambda_i|^2 / 2}
      b(static_cast<Eigen::Index>(i)) = monomial(n, nodes[i]) * std::exp(-kPi * std::norm(nodes[i]) / 2.0);
    }
    const double proj = (b.adjoint() * pinv * b)(0, 0).real();
    out.push_back(checked_residual(1.0 - proj, "completeness_residual: projection outside [0, 1]"));
  }
  return out;
}

std::vector<Complex> nodes_from(const PointSet& set) {
  std::vector<Complex> out;
  out.reserve(set.size());
  for (const auto& p : set.points()) out.push_back(p.is_origin() ? Complex(0.0, 0.0) : p.to_complex());
  return out;
}

}  // namespace gdl::fock
