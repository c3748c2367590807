#include "rigidity/errors.hpp"

namespace rigidity {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonConvex: return "NonConvex";
    case ErrorKind::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorKind::DegenerateChord: return "DegenerateChord";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotMaximal: return "NotMaximal";
    case ErrorKind::SingularTransfer: return "SingularTransfer";
    case ErrorKind::SingularAngle: return "SingularAngle";
    case ErrorKind::InsufficientLadder: return "InsufficientLadder";
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::SymmetryViolation: return "SymmetryViolation";
  }
  return "Unknown";
}

}  // namespace rigidity
