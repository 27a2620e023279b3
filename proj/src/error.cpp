#include "gwvqa/error.hpp"

namespace gwvqa {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptySegmentation: return "EmptySegmentation";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::FrequencyRange: return "FrequencyRangeError";
    case ErrorCode::BandEmpty: return "BandEmpty";
    case ErrorCode::BandError: return "BandError";
    case ErrorCode::NormalizationError: return "NormalizationError";
    case ErrorCode::UnphysicalCoordinates: return "UnphysicalCoordinates";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::NoMarkedStates: return "NoMarkedStates";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::EvaluationError: return "EvaluationError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DataError: return "DataError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace gwvqa
