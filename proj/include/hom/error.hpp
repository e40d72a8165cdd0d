#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hom {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
  invalid_argument,
  grid_too_narrow,
  not_normalizable,
  length_mismatch,
  grid_mismatch,
  aliasing_risk,
  zero_density_instant,
  degenerate_width,
  quadrature_not_converged,
  rejection_budget_exceeded,
  empty_range,
  too_few_events,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::grid_too_narrow: return "GridTooNarrow";
    case ErrorKind::not_normalizable: return "NotNormalizable";
    case ErrorKind::length_mismatch: return "LengthMismatch";
    case ErrorKind::grid_mismatch: return "GridMismatch";
    case ErrorKind::aliasing_risk: return "AliasingRisk";
    case ErrorKind::zero_density_instant: return "ZeroDensityInstant";
    case ErrorKind::degenerate_width: return "DegenerateWidth";
    case ErrorKind::quadrature_not_converged: return "QuadratureNotConverged";
    case ErrorKind::rejection_budget_exceeded: return "RejectionBudgetExceeded";
    case ErrorKind::empty_range: return "EmptyRange";
    case ErrorKind::too_few_events: return "TooFewEvents";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace hom
