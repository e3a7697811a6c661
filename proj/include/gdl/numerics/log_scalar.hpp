#pragma once

#include <compare>
#include <span>

#include "gdl/numerics/precision.hpp"

namespace gdl {

/// Signed real stored as (sign, natural log of |value|).
///
/// Covers magnitudes such as exp(pi r^2 / 2) at r ~ 1e10 that overflow
/// binary64. The zero value has sign 0 and its log_abs is ignored.
class LogScalar {
 public:
  constexpr LogScalar() = default;

  static LogScalar from_log(double log_abs, int sign = 1);
  static LogScalar from_double(double x);
  static LogScalar zero() { return {}; }

  int sign() const { return sign_; }
  double log_abs() const { return log_abs_; }
  bool is_zero() const { return sign_ == 0; }

  /// Converts to binary64; saturates to +-inf / 0 outside its range.
  double to_double() const;

  LogScalar operator-() const;
  friend LogScalar operator+(const LogScalar& a, const LogScalar& b);
  friend LogScalar operator-(const LogScalar& a, const LogScalar& b) { return a + (-b); }
  friend LogScalar operator*(const LogScalar& a, const LogScalar& b);
  friend LogScalar operator/(const LogScalar& a, const LogScalar& b);

  LogScalar& operator+=(const LogScalar& o) { return *this = *this + o; }
  LogScalar& operator*=(const LogScalar& o) { return *this = *this * o; }

  friend std::partial_ordering operator<=>(const LogScalar& a, const LogScalar& b);
  friend bool operator==(const LogScalar& a, const LogScalar& b) {
    return (a <=> b) == std::partial_ordering::equivalent;
  }

 private:
  constexpr LogScalar(int sign, double log_abs) : sign_(sign), log_abs_(log_abs) {}

  int sign_ = 0;
  double log_abs_ = 0.0;
};

/// Sum of signed log-domain values. With the default context the sum is a
/// compensated binary64 sum of exp(l_i - max); larger digit counts switch to
/// MPFR. Relative error is at most 10^(1 - decimal_digits).
LogScalar log_sum(std::span<const LogScalar> values, const PrecisionContext& ctx = {});

}  // namespace gdl
