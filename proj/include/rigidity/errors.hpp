#pragma once

#include <stdexcept>
#include <string>

namespace rigidity {

enum class ErrorKind {
  InvalidArgument,
  NonConvex,
  NonPositiveRadius,
  DegenerateChord,
  NoConvergence,
  NotMaximal,
  SingularTransfer,
  SingularAngle,
  InsufficientLadder,
  NotContractive,
  ResidualTooLarge,
  SymmetryViolation,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rigidity
