#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bellcat {

enum class ErrorCode {
  NotHermitian,
  ZeroOperator,
  DimensionMismatch,
  BadWeights,
  NullTwist,
  InvalidState,
  InvalidQuadruple,
  InvalidSplit,
  CommutingProjections,
  NotProjection,
  NotDichotomic,
  NotUnitary,
  NonFinite,
  MasslessUnsupported,
  InvalidModel,
  SupportViolation,
  UncertaintyViolation,
  OddDimension,
  Parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::ZeroOperator: return "ZeroOperator";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::NullTwist: return "NullTwist";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidQuadruple: return "InvalidQuadruple";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::CommutingProjections: return "CommutingProjections";
    case ErrorCode::NotProjection: return "NotProjection";
    case ErrorCode::NotDichotomic: return "NotDichotomic";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MasslessUnsupported: return "MasslessUnsupported";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::UncertaintyViolation: return "UncertaintyViolation";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above, so
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bellcat
