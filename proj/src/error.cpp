#include "fmdiag/error.hpp"

namespace fmdiag {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::SignalTooShort: return "signal-too-short";
    case ErrorKind::DegenerateSignal: return "degenerate-signal";
    case ErrorKind::DegenerateRange: return "degenerate-range";
    case ErrorKind::NoPeriodicity: return "no-periodicity";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::VersionError: return "version-error";
    case ErrorKind::IoError: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace fmdiag
