#include "wapf/error.hpp"

#include <sstream>

namespace wapf {

std::string_view error_category(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidValue: return "invalid-value";
    case ErrorKind::PositivityViolation: return "positivity-violation";
    case ErrorKind::StepRejected: return "step-rejected";
    case ErrorKind::DegenerateKernel: return "degenerate-kernel";
    case ErrorKind::Shape: return "shape-mismatch";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Io: return "io";
    case ErrorKind::Format: return "format";
    case ErrorKind::Config: return "config";
    case ErrorKind::Singularity: return "singularity";
  }
  return "unknown";
}

namespace {
std::string positivity_message(std::size_t cell, double time, double value) {
  std::ostringstream os;
  os.precision(17);
  os << "density not strictly positive at cell " << cell << " (rho=" << value
     << ") at t=" << time;
  return os.str();
}
}  // namespace

PositivityError::PositivityError(std::size_t cell, double time, double value)
    : Error(ErrorKind::PositivityViolation, positivity_message(cell, time, value)),
      cell_(cell),
      time_(time),
      value_(value) {}

}  // namespace wapf
