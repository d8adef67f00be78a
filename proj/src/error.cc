#include "rotvo/error.hpp"

namespace rotvo {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kInsufficientCorrespondences:
      return "insufficient-correspondences";
    case ErrorCode::kNoModel:
      return "no-model";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kFormat:
      return "format";
    case ErrorCode::kNumerical:
      return "numerical";
    case ErrorCode::kUnsupported:
      return "unsupported-metric";
    case ErrorCode::kEmptyPairSet:
      return "empty-pair-set";
  }
  return "unknown";
}

}  // namespace rotvo
