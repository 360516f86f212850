#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlwave {

// Validation errors are caller mistakes (bad shapes, bad parameters, bad
// config). Numerical errors are failures of an otherwise valid computation.
enum class ErrorKind { validation, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct ContractError : Error {
  explicit ContractError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct SymmetryError : Error {
  explicit SymmetryError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct DefinitenessError : Error {
  explicit DefinitenessError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct CapacityError : Error {
  explicit CapacityError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, std::ptrdiff_t pivot)
      : Error(ErrorKind::numerical, what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}
  std::ptrdiff_t pivot() const noexcept { return pivot_; }

 private:
  std::ptrdiff_t pivot_;
};

struct DegenerateUpdateError : Error {
  explicit DegenerateUpdateError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, long iterations)
      : Error(ErrorKind::numerical, what + " after " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}
  long iterations() const noexcept { return iterations_; }

 private:
  long iterations_;
};

class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, long step)
      : Error(ErrorKind::numerical, what + " at step " + std::to_string(step)), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace nlwave
