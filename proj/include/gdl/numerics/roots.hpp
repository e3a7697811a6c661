#pragma once

#include "gdl/numerics/quadrature.hpp"

namespace gdl {

/// Root of a continuous strictly monotone function by bisection.
///
/// The bracket may be given in either order and f may be increasing or
/// decreasing. Stops once |f(x)| <= tol or the bracket is narrower than tol.
/// Throws NoBracket when f has the same strict sign at both ends.
double solve_monotone(const RealFunction& f, double lo, double hi, double tol);

}  // namespace gdl
