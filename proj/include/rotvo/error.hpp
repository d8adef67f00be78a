#pragma once

#include <stdexcept>
#include <string>

namespace rotvo {

enum class ErrorCode {
  kInvalidArgument,
  kInsufficientCorrespondences,
  kNoModel,
  kIo,
  kFormat,
  kNumerical,
  kUnsupported,
  kEmptyPairSet,
};

const char* ErrorCodeName(ErrorCode code);

// Single exception type for the library; the code drives the C API status
// mapping and the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Throw(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rotvo
