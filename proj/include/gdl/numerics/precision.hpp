#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <mutex>

namespace gdl {

using MpReal = boost::multiprecision::mpfr_float;

/// Number of significant decimal digits used for an evaluation.
struct PrecisionContext {
  int decimal_digits = 16;

  bool native() const { return decimal_digits <= 16; }
};

/// Sets the MPFR working precision for the lifetime of the guard.
///
/// Boost 1.74 keeps the default MPFR precision in a process-wide variable,
/// so guards serialize on a recursive mutex; nested guards on one thread
/// are allowed and restore the outer precision on exit.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(int decimal_digits);
  ~ScopedPrecision();

  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  std::unique_lock<std::recursive_mutex> lock_;
  unsigned saved_;
};

MpReal mp_pi();

}  // namespace gdl
