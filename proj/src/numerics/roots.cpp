#include "gdl/numerics/roots.hpp"

#include <cmath>
#include <utility>

#include "gdl/errors.hpp"

namespace gdl {

double solve_monotone(const RealFunction& f, double lo, double hi, double tol) {
  if (lo > hi) std::swap(lo, hi);
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NoBracket("solve_monotone: f has the same sign at both ends");

  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (std::abs(fmid) <= tol || hi - lo <= tol || mid == lo || mid == hi) return mid;
    if ((fmid > 0) == (flo > 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace gdl
