#pragma once

#include <stdexcept>
#include <string>

namespace gasflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed JSON or missing/ill-typed fields.
class SchemaError : public Error {
 public:
  using Error::Error;
};

enum class ValidationKind {
  kNonPositiveBeta,
  kSelfLoop,
  kUnbalancedComponent,
  kFixedPotentialOutOfBounds,
  kDuplicateId,
  kUnknownNode,
  kInvalidBounds,
  kNonFinite,
  kSizeMismatch,
};

const char* to_string(ValidationKind kind);

class ValidationError : public Error {
 public:
  ValidationError(ValidationKind kind, const std::string& detail)
      : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ValidationKind kind() const { return kind_; }

 private:
  ValidationKind kind_;
};

/// Argument outside the mathematical domain of an operation (e.g. beta <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(double residual, int iterations)
      : Error("solver did not converge: residual " + std::to_string(residual) +
              " after " + std::to_string(iterations) + " iterations"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class ZeroFlow : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed the configured size limit.
class SizeLimit : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class NoFeasiblePoint : public Error {
 public:
  using Error::Error;
};

}  // namespace gasflow
