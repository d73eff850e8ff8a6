#include "arom/error.hpp"

namespace arom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::bad_magic: return "bad_magic";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::invalid_header: return "invalid_header";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::asymmetric: return "asymmetric";
    case ErrorCode::not_positive_definite: return "not_positive_definite";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::fingerprint_mismatch: return "fingerprint_mismatch";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

}  // namespace arom
