#include "gdl/numerics/precision.hpp"

#include <boost/math/constants/constants.hpp>

namespace gdl {
namespace {

std::recursive_mutex& precision_mutex() {
  static std::recursive_mutex m;
  return m;
}

}  // namespace

ScopedPrecision::ScopedPrecision(int decimal_digits)
    : lock_(precision_mutex()), saved_(MpReal::default_precision()) {
  MpReal::default_precision(static_cast<unsigned>(decimal_digits));
}

ScopedPrecision::~ScopedPrecision() { MpReal::default_precision(saved_); }

MpReal mp_pi() { return boost::math::constants::pi<MpReal>(); }

}  // namespace gdl
