#ifndef NTERM_ERROR_HPP
#define NTERM_ERROR_HPP

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace nterm {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// A precondition on an argument does not hold.
class DomainError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

/// A computation would exceed the configured point/work budget.
class BudgetExceeded : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "budget"; }
};

/// A series or scan did not terminate within its budget.
class ConvergenceError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "convergence"; }
};

/// psi'(t) vanished where alpha(psi, t) was requested.
class DerivativeZero : public DomainError {
public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "derivative_zero"; }
};

/// Enumeration and grid budget, in lattice points.
struct Budget {
  std::uint64_t points = 10'000'000;

  /// Default budget, overridden by the NTERM_BUDGET_POINTS environment
  /// variable when it holds a positive integer.
  static Budget from_env() {
    Budget b;
    if (const char* v = std::getenv("NTERM_BUDGET_POINTS")) {
      char* end = nullptr;
      const unsigned long long parsed = std::strtoull(v, &end, 10);
      if (end != v && *end == '\0' && parsed > 0) b.points = parsed;
    }
    return b;
  }
};

} // namespace nterm

#endif
