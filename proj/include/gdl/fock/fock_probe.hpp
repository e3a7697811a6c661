#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "gdl/density/point_set.hpp"

// Gaussian Gabor systems seen through the Bargmann transform: shifts of the
// window become normalized reproducing kernels of the Fock space, so finite
// sections of a Gabor system are probed through kernel Gram matrices.
namespace gdl::fock {

using Complex = std::complex<double>;

/// 2^(1/4) exp(-pi t^2), unit L2 norm.
double gaussian_window(double t);

/// Uniform grid t_i = t_min + i (t_max - t_min) / (n - 1) with complex samples.
struct SampledSignal {
  double t_min = -6.0;
  double t_max = 6.0;
  std::size_t n = 4096;
  std::vector<Complex> values;

  double step() const { return (t_max - t_min) / static_cast<double>(n - 1); }
  double t(std::size_t i) const { return t_min + step() * static_cast<double>(i); }
  /// Endpoint magnitude above 1e-12 of the peak.
  bool clipped() const;
};

SampledSignal sample(const std::function<Complex(double)>& f, double t_min = -6.0, double t_max = 6.0,
                     std::size_t n = 4096);

/// Samples of rho_{t0, w0} f (x) = e^{2 pi i w0 x} f(x - t0) on the given
/// grid. Throws SupportClipped when `strict` and the result is clipped.
SampledSignal tf_shift(const std::function<Complex(double)>& f, double t0, double w0, double t_min = -6.0,
                       double t_max = 6.0, std::size_t n = 4096, bool strict = false);

/// Trapezoid L2 norm.
double l2_norm(const SampledSignal& f);

/// 2^(1/4) int f(t) e^{-pi t^2} e^{2 pi t z} e^{-pi z^2 / 2} dt by the
/// trapezoid rule. Throws GridInsufficient when the integrand is not
/// negligible at the grid ends or its oscillation is under-sampled.
Complex bargmann(const SampledSignal& f, Complex z);

/// exp(pi conj(lambda) z).
Complex kernel_eval(Complex lambda, Complex z);

/// e^{i pi t w} e^{-pi |lambda|^2 / 2} e^{pi lambda z}, lambda = t + i w: the
/// Bargmann transform of rho_{t, w} phi. The unimodular factor comes from
/// the order of translation and modulation in rho.
Complex shifted_window_transform(Complex lambda, Complex z);

/// Normalized kernel Gram matrix G_ij = <k~_i, k~_j> =
/// exp(pi conj(lambda_i) lambda_j - pi (|lambda_i|^2 + |lambda_j|^2) / 2).
struct GramMatrix {
  std::vector<Complex> nodes;
  Eigen::MatrixXcd entries;
};

GramMatrix build_gram(const std::vector<Complex>& nodes, int threads = 1);

/// Smallest eigenvalue of the Gram matrix.
double min_eigenvalue(const GramMatrix& g);

/// CSV `i,j,re,im`, one row per entry.
void write_gram_csv(std::ostream& out, const GramMatrix& g);

/// Squared distance of k~_index to the span of the other normalized
/// kernels, 1 - g^* G_rest^+ g with an eigenvalue cutoff of 1e-12 relative.
/// Throws IllConditioned when round-off pushes the result outside [0, 1].
double minimality_residual(const std::vector<Complex>& nodes, std::size_t index);

/// e_n(z) = sqrt(pi^n / n!) z^n.
Complex monomial(int n, Complex z);

/// For n = 0..degree_max, 1 - |P e_n|^2 where P projects onto the span of
/// the normalized kernels at the nodes.
std::vector<double> completeness_residual(const std::vector<Complex>& nodes, int degree_max);

/// Points of a PointSet in its (log_r, phi) order; the origin comes first.
std::vector<Complex> nodes_from(const PointSet& set);

}  // namespace gdl::fock
