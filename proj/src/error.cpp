#include "hyperlens/error.hpp"

namespace hyperlens {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonHermitianSpectrum: return "NonHermitianSpectrum";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::BandOutOfRange: return "BandOutOfRange";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
  }
  return "Unknown";
}

}  // namespace hyperlens
