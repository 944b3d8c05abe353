#pragma once

#include <stdexcept>
#include <string>

namespace minsurf {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MINSURF_DEFINE_ERROR(Name)        \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

MINSURF_DEFINE_ERROR(DomainError)
MINSURF_DEFINE_ERROR(OrderExceeded)
MINSURF_DEFINE_ERROR(UnknownCatalogName)
MINSURF_DEFINE_ERROR(ConstraintViolation)
MINSURF_DEFINE_ERROR(NotConformal)
MINSURF_DEFINE_ERROR(DivisionByDegenerateNormalCurvature)
MINSURF_DEFINE_ERROR(FrameDiscontinuity)
MINSURF_DEFINE_ERROR(CurvatureOne)
MINSURF_DEFINE_ERROR(EvaluationFailure)
MINSURF_DEFINE_ERROR(VariantInapplicable)
MINSURF_DEFINE_ERROR(BaseNotPseudoholomorphic)
MINSURF_DEFINE_ERROR(UnsupportedKind)
MINSURF_DEFINE_ERROR(SignDiscontinuity)
MINSURF_DEFINE_ERROR(ConfigError)

#undef MINSURF_DEFINE_ERROR

/// A normal level of the osculating flag is missing or collapsed.
class DegenerateFlag : public Error {
 public:
  DegenerateFlag(int level, const std::string& what)
      : Error("degenerate flag at level " + std::to_string(level) + ": " + what), level_(level) {}
  int level() const noexcept { return level_; }

 private:
  int level_;
};

/// Some C-vector of the direct-sum recursion vanished.
class ZeroVector : public Error {
 public:
  explicit ZeroVector(int index)
      : Error("C-vector C_" + std::to_string(index) + " vanishes numerically"), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

}  // namespace minsurf
