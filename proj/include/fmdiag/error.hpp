#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fmdiag {

enum class ErrorKind {
  InvalidArgument,
  InvalidConfig,
  SignalTooShort,
  DegenerateSignal,
  DegenerateRange,
  NoPeriodicity,
  NumericalFailure,
  ParseError,
  VersionError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fmdiag
