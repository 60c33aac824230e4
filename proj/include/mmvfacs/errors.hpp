#pragma once

#include <stdexcept>
#include <string>

namespace mmvfacs {

enum class ErrorCode {
  DimensionMismatch,
  RankDeficient,
  InvalidSparsity,
  UnionTooLarge,
  BudgetExceeded,
  DeltaOutOfRange,
  PremiseViolated,
  ZeroSignal,
  ConfigInvalid,
  MalformedCsv,
  DegenerateColumn,
  NonFinite,
  NonConvergence,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidSparsity: return "InvalidSparsity";
    case ErrorCode::UnionTooLarge: return "UnionTooLarge";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::PremiseViolated: return "PremiseViolated";
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace mmvfacs
