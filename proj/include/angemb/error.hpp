#ifndef ANGEMB_ERROR_HPP
#define ANGEMB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace angemb {

enum class ErrorCode {
  InvalidData,
  EmptyAfterNormalization,
  InvalidRank,
  RankDeficient,
  InvalidThreshold,
  SingularStep,
  MixedDimensions,
  UnsupportedFormat,
  EmptyInput,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidData: return "InvalidData";
    case ErrorCode::EmptyAfterNormalization: return "EmptyAfterNormalization";
    case ErrorCode::InvalidRank: return "InvalidRank";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::SingularStep: return "SingularStep";
    case ErrorCode::MixedDimensions: return "MixedDimensions";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace angemb

#endif  // ANGEMB_ERROR_HPP
