#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rinx {

enum class ErrorCode {
  MalformedRecord,
  InconsistentTopology,
  Empty,
  SchemaViolation,
  MissingCAlpha,
  InvalidConfig,
  NoConvergence,
  LengthMismatch,
  MeasureMismatch,
  CoincidentPoints,
  InvalidPayload,
  NotFound,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRecord: return "malformed_record";
    case ErrorCode::InconsistentTopology: return "inconsistent_topology";
    case ErrorCode::Empty: return "empty";
    case ErrorCode::SchemaViolation: return "schema_violation";
    case ErrorCode::MissingCAlpha: return "missing_calpha";
    case ErrorCode::InvalidConfig: return "invalid_config";
    case ErrorCode::NoConvergence: return "no_convergence";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::MeasureMismatch: return "measure_mismatch";
    case ErrorCode::CoincidentPoints: return "coincident_points";
    case ErrorCode::InvalidPayload: return "invalid_payload";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown";
}

// Every failure in the library is reported through this one type; the code
// is what callers (and the wire protocol) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rinx
