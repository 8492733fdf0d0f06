#include "optstudy/error.hpp"

namespace optstudy {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnrecognizedTemplate: return "UnrecognizedTemplate";
    case ErrorCode::MalformedRange: return "MalformedRange";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::ZeroNominal: return "ZeroNominal";
    case ErrorCode::UnresolvedToken: return "UnresolvedToken";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::NonNumericCapture: return "NonNumericCapture";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::Interrupted: return "Interrupted";
    case ErrorCode::BackendFailure: return "BackendFailure";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DuplicateAbscissae: return "DuplicateAbscissae";
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::EigenNoConvergence: return "EigenNoConvergence";
    case ErrorCode::BootstrapDegenerate: return "BootstrapDegenerate";
    case ErrorCode::UnsupportedGoal: return "UnsupportedGoal";
    case ErrorCode::MissingGoal: return "MissingGoal";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnrecognizedTemplate:
    case ErrorCode::MalformedRange:
    case ErrorCode::MissingTarget:
    case ErrorCode::SchemaError:
    case ErrorCode::ValidationError:
    case ErrorCode::DegenerateRange:
    case ErrorCode::ZeroNominal:
    case ErrorCode::MissingGoal:
    case ErrorCode::UnsupportedGoal:
      return 2;
    case ErrorCode::UnresolvedToken:
    case ErrorCode::NoMatch:
    case ErrorCode::NonNumericCapture:
    case ErrorCode::EmptyColumn:
    case ErrorCode::BackendFailure:
    case ErrorCode::Interrupted:
      return 3;
    case ErrorCode::InsufficientData:
    case ErrorCode::RankDeficient:
    case ErrorCode::DuplicateAbscissae:
    case ErrorCode::ZeroGradient:
    case ErrorCode::BootstrapDegenerate:
      return 4;
    case ErrorCode::EigenNoConvergence:
    case ErrorCode::PreconditionViolated:
    case ErrorCode::IoError:
      return 1;
  }
  return 1;
}

StudyError::StudyError(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw StudyError(code, message); }

} // namespace optstudy
