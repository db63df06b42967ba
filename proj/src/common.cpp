#include "vsrplan/common.hpp"

#include <charconv>

namespace vsr {

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedMatrix: return "MalformedMatrix";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::NumericParse: return "NumericParse";
    case ErrorCode::IslandedNetwork: return "IslandedNetwork";
    case ErrorCode::ZeroReactance: return "ZeroReactance";
    case ErrorCode::NoReference: return "NoReference";
    case ErrorCode::SingularCompensation: return "SingularCompensation";
    case ErrorCode::IslandingContingency: return "IslandingContingency";
    case ErrorCode::DurationUnderflow: return "DurationUnderflow";
    case ErrorCode::MissingState: return "MissingState";
    case ErrorCode::ModelSizeExceeded: return "ModelSizeExceeded";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::RecoveryOutOfRange: return "RecoveryOutOfRange";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string Error::format(ErrorCode code, const std::string& message,
                          int line) {
  std::string out = to_string(code);
  out += ": ";
  out += message;
  if (line > 0) {
    out += " (line ";
    out += std::to_string(line);
    out += ")";
  }
  return out;
}

}  // namespace vsr
