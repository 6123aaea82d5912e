#include "rauzylab/errors.hpp"

namespace rauzylab {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::DuplicateLetter: return "DuplicateLetter";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ReduciblePair: return "ReduciblePair";
    case ErrorKind::NotALoop: return "NotALoop";
    case ErrorKind::ConstructionFailed: return "ConstructionFailed";
    case ErrorKind::TieUndefined: return "TieUndefined";
    case ErrorKind::StepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::NotSurjective: return "NotSurjective";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ModulusMismatch: return "ModulusMismatch";
    case ErrorKind::EvenPrime: return "EvenPrime";
    case ErrorKind::EvenModulus: return "EvenModulus";
    case ErrorKind::ZeroModP: return "ZeroModP";
    case ErrorKind::OddRank: return "OddRank";
    case ErrorKind::NonUnimodularForm: return "NonUnimodularForm";
    case ErrorKind::NotSymplectic: return "NotSymplectic";
    case ErrorKind::BoundaryPoint: return "BoundaryPoint";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::EmptyBranchSet: return "EmptyBranchSet";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

}  // namespace rauzylab
