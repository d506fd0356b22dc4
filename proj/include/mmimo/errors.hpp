#pragma once

#include <stdexcept>
#include <string>

namespace mmimo {

// Input outside the mathematical domain of an operation (e.g. a CP fraction of 1.2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller broke a documented precondition (dimension mismatch, empty input).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumeration would exceed a hard size limit (K! permutations, 2^(L-1) sign rows).
class ResourceGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A Gram matrix could not be inverted reliably.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}

  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

// Zero-norm CSI row; a precoder direction cannot be formed.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmimo
