#pragma once

#include <stdexcept>
#include <string>

namespace optstudy {

enum class ErrorCode {
  // study-model
  UnrecognizedTemplate,
  MalformedRange,
  MissingTarget,
  SchemaError,
  ValidationError,
  // sampling
  DegenerateRange,
  ZeroNominal,
  // backend
  UnresolvedToken,
  NoMatch,
  NonNumericCapture,
  EmptyColumn,
  InsufficientData,
  Interrupted,
  BackendFailure,
  // surrogate / active subspace
  RankDeficient,
  DuplicateAbscissae,
  ZeroGradient,
  EigenNoConvergence,
  BootstrapDegenerate,
  // optimize
  UnsupportedGoal,
  MissingGoal,
  // generic
  PreconditionViolated,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Process exit status for the CLI: 2 spec/validation, 3 backend, 4 data.
int exit_status(ErrorCode code) noexcept;

class StudyError : public std::runtime_error {
public:
  StudyError(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

} // namespace optstudy
