#pragma once

#include <stdexcept>
#include <string>

namespace gwvqa {

// Values mirror gwvqa_status in gwvqa.h.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  EmptySegmentation = 2,
  InsufficientData = 3,
  FrequencyRange = 4,
  BandEmpty = 5,
  BandError = 6,
  NormalizationError = 7,
  UnphysicalCoordinates = 8,
  DomainError = 9,
  AlignmentError = 10,
  DimensionError = 11,
  ArityError = 12,
  NoMarkedStates = 13,
  TypeError = 14,
  EvaluationError = 15,
  ConfigError = 16,
  DataError = 17,
  IoError = 18,
  Internal = 19,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(error_code_name(code)) + ": " + what);
}

inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace gwvqa
