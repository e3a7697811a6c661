#pragma once

#include <stdexcept>
#include <string>

namespace gdl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GDL_DEFINE_ERROR(Name)             \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  };

GDL_DEFINE_ERROR(DomainError)
GDL_DEFINE_ERROR(NonConvergence)
GDL_DEFINE_ERROR(NoBracket)
GDL_DEFINE_ERROR(EmptyWindow)
GDL_DEFINE_ERROR(NotPresent)
GDL_DEFINE_ERROR(AlreadyPresent)
GDL_DEFINE_ERROR(LengthMismatch)
GDL_DEFINE_ERROR(InvalidParams)
GDL_DEFINE_ERROR(OutOfRange)
GDL_DEFINE_ERROR(OutOfDomain)
GDL_DEFINE_ERROR(PrecisionInsufficient)
GDL_DEFINE_ERROR(WindowTooThin)
GDL_DEFINE_ERROR(Singularity)
GDL_DEFINE_ERROR(ZeroOnCircle)
GDL_DEFINE_ERROR(ResolutionTooCoarse)
GDL_DEFINE_ERROR(GridInsufficient)
GDL_DEFINE_ERROR(SupportClipped)
GDL_DEFINE_ERROR(IllConditioned)
GDL_DEFINE_ERROR(ParseError)

#undef GDL_DEFINE_ERROR

}  // namespace gdl
