#include "gdl/numerics/log_scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gdl {

LogScalar LogScalar::from_log(double log_abs, int sign) {
  if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) return {};
  return {sign > 0 ? 1 : -1, log_abs};
}

LogScalar LogScalar::from_double(double x) {
  if (x == 0.0) return {};
  return {x > 0 ? 1 : -1, std::log(std::abs(x))};
}

double LogScalar::to_double() const {
  if (sign_ == 0) return 0.0;
  return sign_ * std::exp(log_abs_);
}

LogScalar LogScalar::operator-() const { return {-sign_, log_abs_}; }

LogScalar operator+(const LogScalar& a, const LogScalar& b) {
  if (a.sign_ == 0) return b;
  if (b.sign_ == 0) return a;
  const LogScalar& big = a.log_abs_ >= b.log_abs_ ? a : b;
  const LogScalar& small = a.log_abs_ >= b.log_abs_ ? b : a;
  const double ratio = std::exp(small.log_abs_ - big.log_abs_);
  if (big.sign_ == small.sign_) return {big.sign_, big.log_abs_ + std::log1p(ratio)};
  if (small.log_abs_ == big.log_abs_) return {};
  return {big.sign_, big.log_abs_ + std::log1p(-ratio)};
}

LogScalar operator*(const LogScalar& a, const LogScalar& b) {
  if (a.sign_ == 0 || b.sign_ == 0) return {};
  return {a.sign_ * b.sign_, a.log_abs_ + b.log_abs_};
}

LogScalar operator/(const LogScalar& a, const LogScalar& b) {
  if (b.sign_ == 0) {
    return {a.sign_ >= 0 ? 1 : -1, std::numeric_limits<double>::infinity()};
  }
  if (a.sign_ == 0) return {};
  return {a.sign_ * b.sign_, a.log_abs_ - b.log_abs_};
}

std::partial_ordering operator<=>(const LogScalar& a, const LogScalar& b) {
  if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
  if (a.sign_ == 0) return std::partial_ordering::equivalent;
  return a.sign_ > 0 ? (a.log_abs_ <=> b.log_abs_) : (b.log_abs_ <=> a.log_abs_);
}

LogScalar log_sum(std::span<const LogScalar> values, const PrecisionContext& ctx) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& v : values) {
    if (!v.is_zero()) top = std::max(top, v.log_abs());
  }
  if (top == -std::numeric_limits<double>::infinity()) return {};

  if (ctx.native()) {
    // Neumaier summation of the shifted terms.
    double sum = 0.0;
    double comp = 0.0;
    for (const auto& v : values) {
      if (v.is_zero()) continue;
      const double term = v.sign() * std::exp(v.log_abs() - top);
      const double t = sum + term;
      if (std::abs(sum) >= std::abs(term)) {
        comp += (sum - t) + term;
      } else {
        comp += (term - t) + sum;
      }
      sum = t;
    }
    const double total = sum + comp;
    if (total == 0.0) return {};
    return LogScalar::from_log(top + std::log(std::abs(total)), total > 0 ? 1 : -1);
  }

  ScopedPrecision guard(ctx.decimal_digits + 5);
  MpReal sum = 0;
  const MpReal shift = top;
  for (const auto& v : values) {
    if (v.is_zero()) continue;
    MpReal term = exp(MpReal(v.log_abs()) - shift);
    if (v.sign() < 0) term = -term;
    sum += term;
  }
  if (sum == 0) return {};
  const int sign = sum > 0 ? 1 : -1;
  const MpReal log_total = log(abs(sum)) + shift;
  return LogScalar::from_log(static_cast<double>(log_total), sign);
}

}  // namespace gdl
