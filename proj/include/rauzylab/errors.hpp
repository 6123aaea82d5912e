#ifndef RAUZYLAB_ERRORS_HPP
#define RAUZYLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rauzylab {

// Error kinds mirror the failure modes of the library operations.
// `CapExceeded` and `StepBudgetExceeded` are resource errors (CLI exit 3),
// everything else is a validation/usage error (CLI exit 2).
enum class ErrorKind {
  DuplicateLetter,
  LengthMismatch,
  ReduciblePair,
  NotALoop,
  ConstructionFailed,
  TieUndefined,
  StepBudgetExceeded,
  CapExceeded,
  NotSurjective,
  NoConvergence,
  DimensionMismatch,
  ModulusMismatch,
  EvenPrime,
  EvenModulus,
  ZeroModP,
  OddRank,
  NonUnimodularForm,
  NotSymplectic,
  BoundaryPoint,
  TooFewSamples,
  EmptyBranchSet,
  ParseError,
  ValidationError,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  bool is_resource_error() const {
    return kind_ == ErrorKind::CapExceeded ||
           kind_ == ErrorKind::StepBudgetExceeded;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace rauzylab

#endif
