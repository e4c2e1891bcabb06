#include "tmc/error.hpp"

namespace tmc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DegenerateOrigin: return "degenerate-origin";
    case ErrorKind::UnregisteredFrame: return "unregistered-frame";
    case ErrorKind::OriginUnset: return "origin-unset";
    case ErrorKind::OriginAlreadySet: return "origin-already-set";
    case ErrorKind::InsufficientPoints: return "insufficient-points";
    case ErrorKind::CollinearConfiguration: return "collinear-configuration";
    case ErrorKind::MalformedLine: return "malformed-line";
    case ErrorKind::InvalidField: return "invalid-field";
    case ErrorKind::OutOfOrder: return "out-of-order";
    case ErrorKind::TimeOutsideSchedule: return "time-outside-schedule";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::InvariantViolation: return "invariant-violation";
    case ErrorKind::MisconfiguredSurrogate: return "misconfigured-surrogate";
    case ErrorKind::IncompatibleBinning: return "incompatible-binning";
    case ErrorKind::NegativeCount: return "negative-count";
    case ErrorKind::NonpositiveLength: return "nonpositive-length";
    case ErrorKind::ScriptValidation: return "script-validation";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace tmc
