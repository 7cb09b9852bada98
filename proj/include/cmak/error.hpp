#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmak {

/// Failure categories surfaced by the library. The CLI maps each one to a
/// stable string in its JSON error payload.
enum class ErrorCode {
  InvalidArgument,
  DomainError,
  NearMultipleRoots,
  NonCausalModel,
  CommonRoots,
  OrderTooLarge,
  UnitModulusBranch,
  QuadratureFailure,
  NonPositiveDensity,
  InsufficientPoints,
  LagTooLarge,
  NonPositiveV,
  NonCausalAR,
  MRequired,
  EmbeddingFailure,
  NonStationaryInit,
  BesselFailure,
  SegmentTooLong,
  IoError,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NearMultipleRoots: return "NearMultipleRoots";
    case ErrorCode::NonCausalModel: return "NonCausalModel";
    case ErrorCode::CommonRoots: return "CommonRoots";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::UnitModulusBranch: return "UnitModulusBranch";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::NonPositiveV: return "NonPositiveV";
    case ErrorCode::NonCausalAR: return "NonCausalAR";
    case ErrorCode::MRequired: return "MRequired";
    case ErrorCode::EmbeddingFailure: return "EmbeddingFailure";
    case ErrorCode::NonStationaryInit: return "NonStationaryInit";
    case ErrorCode::BesselFailure: return "BesselFailure";
    case ErrorCode::SegmentTooLong: return "SegmentTooLong";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace cmak
