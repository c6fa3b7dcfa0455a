#pragma once

#include <stdexcept>
#include <string>

namespace infconv {

enum class ErrorCode {
  InvalidGrid,
  InvalidField,
  NonHermitian,
  GridMismatch,
  ParamOutOfRange,
  ZeroInput,
  InfiniteSeminorm,
  ZeroResidual,
  NotConverged,
  ConfigInvalid,
  GridTooSmall,
  BadPeriod,
  Io,
  Usage,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::InfiniteSeminorm: return "InfiniteSeminorm";
    case ErrorCode::ZeroResidual: return "ZeroResidual";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::BadPeriod: return "BadPeriod";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace infconv
