#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arom {

enum class ErrorCode {
  io,
  bad_magic,
  version_mismatch,
  truncated,
  non_finite,
  invalid_header,
  invalid_argument,
  dimension_mismatch,
  asymmetric,
  not_positive_definite,
  degenerate,
  fingerprint_mismatch,
  config,
};

/// Stable snake_case identifier, used in machine-readable CLI errors.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace arom
