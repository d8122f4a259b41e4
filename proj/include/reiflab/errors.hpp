#pragma once

#include <stdexcept>
#include <string>

namespace reiflab {

/// Bad input: malformed config, violated precondition, unreadable file.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficient matrix is not symmetric positive definite (up to tolerance).
class NotElliptic : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Iterative solver failures: non-convergence or a non-positive curvature
/// direction (the latter means the assembled matrix is broken).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace reiflab
