#pragma once

#include <stdexcept>
#include <string>

namespace gwpath {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GWPATH_DEFINE_ERROR(Name)                 \
  class Name : public Error {                     \
   public:                                        \
    explicit Name(const std::string& what)        \
        : Error(std::string(#Name ": ") + what) {} \
  }

GWPATH_DEFINE_ERROR(InvalidPath);
GWPATH_DEFINE_ERROR(PathOverflow);
GWPATH_DEFINE_ERROR(InvalidLaw);
GWPATH_DEFINE_ERROR(SubcriticalLaw);
GWPATH_DEFINE_ERROR(NonBracketable);
GWPATH_DEFINE_ERROR(NormalizationDrift);
GWPATH_DEFINE_ERROR(HorizonOverflow);
GWPATH_DEFINE_ERROR(DomainError);
GWPATH_DEFINE_ERROR(NotSupercritical);
GWPATH_DEFINE_ERROR(InvalidWindow);
GWPATH_DEFINE_ERROR(PrefixTooShort);
GWPATH_DEFINE_ERROR(SeriesTruncation);
GWPATH_DEFINE_ERROR(HorizonTooShort);
GWPATH_DEFINE_ERROR(TooFewSamples);
GWPATH_DEFINE_ERROR(ConfigError);

#undef GWPATH_DEFINE_ERROR

// Carries the error estimate the integrator reached.
class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& what, double achieved)
      : Error("QuadratureFailure: " + what + " (achieved " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace gwpath
