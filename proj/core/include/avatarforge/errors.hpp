#pragma once

#include <stdexcept>
#include <string>

namespace avatarforge {

enum class Errc {
  MalformedRecord,
  SchemaViolation,
  CycleDetected,
  UnknownDependency,
  Timeout,
  MalformedOutput,
  BackendUnavailable,
  Conflict,
  ConfigIncomplete,
  ConfigError,
  EmptyInput,
  TooShort,
  UnknownField,
  UnknownTrack,
  TooManyTargets,
  EmptyVerdicts,
  EmptyCandidates,
  AllMotionEmpty,
  WrongLayerCount,
  NonFiniteReward,
  WeightLengthMismatch,
  ShapeMismatch,
  IoFailure,
  IncompatibleSchemaVersion,
};

const char* errc_name(Errc c);

// All fatal failures are thrown as Error; the code tells callers which
// contract was broken, `path` optionally points at the offending field.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::string path = {})
      : std::runtime_error(path.empty() ? std::string(errc_name(code)) + ": " + message
                                        : std::string(errc_name(code)) + " at " + path + ": " + message),
        code_(code),
        path_(std::move(path)) {}

  Errc code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

 private:
  Errc code_;
  std::string path_;
};

}  // namespace avatarforge
