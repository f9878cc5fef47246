#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wapf {

enum class ErrorKind {
  InvalidValue,
  PositivityViolation,
  StepRejected,
  DegenerateKernel,
  Shape,
  Domain,
  Io,
  Format,
  Config,
  Singularity,
};

/// Machine-parsable category name, e.g. "positivity-violation".
std::string_view error_category(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view category() const { return error_category(kind_); }

 private:
  ErrorKind kind_;
};

/// Raised by recover_velocity and the integrators when a density cell is not
/// strictly positive.
class PositivityError : public Error {
 public:
  PositivityError(std::size_t cell, double time, double value);

  std::size_t cell() const noexcept { return cell_; }
  double time() const noexcept { return time_; }
  double value() const noexcept { return value_; }

 private:
  std::size_t cell_;
  double time_;
  double value_;
};

}  // namespace wapf
