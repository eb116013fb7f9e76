#ifndef CWTA_ERRORS_HPP
#define CWTA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cwta {

enum class ErrorCode {
  // trajectory construction
  NonMonotoneTime,
  ChangeAfterAbsorption,
  ChangeAfterCensor,
  ScoreOutOfRange,
  MissingBaseline,
  TimeOutOfRange,
  // dataset / test preconditions
  FewerThanTwoGroups,
  EmptyGroup,
  UnknownGroup,
  // simulation
  UnknownCase,
  InvalidConfig,
  CalibrationFailed,
  // power harness
  TargetNotBracketed,
  // ingestion
  MalformedRow,
  DuplicatePatientDay,
  GradeOutOfRange,
  UnknownRecistCode,
  GapFound,
  RecistRegressionAfterPD,
  InconsistentCohort,
  UnknownCohort,
  // reporting
  EmptySeries,
  InvalidMatrix,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace cwta

#endif  // CWTA_ERRORS_HPP
