#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace gdl {

using RealFunction = std::function<double(double)>;

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_floor = 1e-300;
  std::size_t max_evaluations = 1'000'000;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature over [a, b].
///
/// `split_points` inside (a, b) seed the initial partition; pass known kinks
/// there. Throws NonConvergence when the evaluation budget runs out before
/// the estimate drops below max(rel_tol |I|, abs_floor).
QuadResult adaptive_quad(const RealFunction& f, double a, double b, const QuadOptions& options = {},
                         std::span<const double> split_points = {});

double adaptive_quad(const RealFunction& f, double a, double b, double rel_tol);

/// Integrand on [0, 1) equivalent to f on [a, inf) under x = a + u / (1 - u).
RealFunction map_to_unit_interval(RealFunction f, double a);

/// Integral of f over [a, inf).
QuadResult integrate_to_infinity(const RealFunction& f, double a, const QuadOptions& options = {});

}  // namespace gdl
