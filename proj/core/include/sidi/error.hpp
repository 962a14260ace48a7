#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sidi {

enum class ErrorCode {
  InvalidArgument,
  IllConditioned,
  NotPositiveDefinite,
  Singular,
  NotCommuting,
  NotIdempotent,
  NotInCommutant,
  TooLarge,
  NotBlockDiagonalizable,
  UnknownExample,
  BadParams,
  MalformedCertificate,
  MalformedInput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying one of the toolkit's error codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sidi
