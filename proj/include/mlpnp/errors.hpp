#pragma once

#include <stdexcept>
#include <string>

namespace mlpnp {

enum class ErrorCode {
  parse_error = 2,
  too_few_points = 3,
  rank_deficient = 4,
  ill_conditioned = 5,
  singular_normal_matrix = 6,
  degenerate_covariance = 7,
  zero_redundancy = 8,
  behind_camera = 9,
  zero_estimate = 10,
  config_error = 11,
  io_error = 12,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::too_few_points: return "TooFewPoints";
    case ErrorCode::rank_deficient: return "RankDeficient";
    case ErrorCode::ill_conditioned: return "IllConditioned";
    case ErrorCode::singular_normal_matrix: return "SingularNormalMatrix";
    case ErrorCode::degenerate_covariance: return "DegenerateCovariance";
    case ErrorCode::zero_redundancy: return "ZeroRedundancy";
    case ErrorCode::behind_camera: return "BehindCamera";
    case ErrorCode::zero_estimate: return "ZeroEstimate";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::io_error: return "IoError";
  }
  return "UnknownError";
}

// All recoverable failures surface as this exception. code() doubles as the
// process exit code of the command line tool.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlpnp
