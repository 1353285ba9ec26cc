#pragma once

#include <stdexcept>
#include <string>

namespace skinseg {

enum class ErrorCode {
  InvalidArgument,
  Io,
  EmptyTraining,
  ModelVersion,
  ModelMalformed,
  ModelMissingPlane,
  DimensionMismatch,
  MalformedGroundTruth,
  Config,
  Precondition,
};

// Every failure raised by the library carries one of the codes above so the
// C API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace skinseg
