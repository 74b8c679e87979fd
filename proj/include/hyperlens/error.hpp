#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperlens {

enum class ErrorCode {
  DimensionMismatch,
  NonHermitianSpectrum,
  SupportTooLarge,
  NotApplicable,
  NotDivisible,
  EpsilonOutOfRange,
  BandOutOfRange,
  NonPositiveInput,
  InvalidParams,
  InvalidArgument,
  ParseError,
  IoError,
  GridTooLarge,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported through this type.
/// The code is stable and is what the CLI maps onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hyperlens
