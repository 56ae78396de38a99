#pragma once

#include <stdexcept>
#include <string>

namespace lpzeros {

// Every failure raised by the library derives from Error so callers can map
// categories onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad interval, unknown family, violated parameter bounds.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Parameter t outside the declared open interval U.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite value met during integration.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double node) : Error(what), node_(node) {}
  double node() const noexcept { return node_; }

 private:
  double node_;
};

// A measure invariant (e.g. positive mass size) failed at evaluation time.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Zeros not all real, not simple, or outside the support hull.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

// A condition was requested that does not apply to the configured measure.
class InapplicableError : public Error {
 public:
  using Error::Error;
};

// A computed quantity contradicts a sign that holds identically.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace lpzeros
