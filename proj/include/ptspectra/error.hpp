#pragma once

#include <stdexcept>
#include <string>

namespace ptspectra {

/// Input outside the mathematical domain of an operation (negative epsilon,
/// unsupported basis order, nonpositive level energies, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method gave up: step budget, QR sweeps, secant iterations.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed command line or configuration.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ptspectra
