#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vsr {

enum class ErrorCode {
  MalformedMatrix,
  MissingSection,
  NumericParse,
  IslandedNetwork,
  ZeroReactance,
  NoReference,
  SingularCompensation,
  IslandingContingency,
  DurationUnderflow,
  MissingState,
  ModelSizeExceeded,
  NameCollision,
  RecoveryOutOfRange,
  BadConfig,
  IoError,
};

const char* to_string(ErrorCode code);

// Domain error with a stable code plus human-readable context. Parser errors
// carry the 1-based source line that triggered them (0 when not applicable).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, int line = 0)
      : std::runtime_error(format(code, message, line)),
        code_(code),
        line_(line) {}

  ErrorCode code() const { return code_; }
  int line() const { return line_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            int line);
  ErrorCode code_;
  int line_;
};

// Non-fatal validation notes accumulated during ingest/build.
using Warnings = std::vector<std::string>;

// Shortest decimal form that round-trips v exactly; "0" for signed zero.
std::string format_number(double v);

}  // namespace vsr
