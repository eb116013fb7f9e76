#include "cwta/errors.hpp"

namespace cwta {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorCode::ChangeAfterAbsorption: return "ChangeAfterAbsorption";
    case ErrorCode::ChangeAfterCensor: return "ChangeAfterCensor";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::FewerThanTwoGroups: return "FewerThanTwoGroups";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::TargetNotBracketed: return "TargetNotBracketed";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicatePatientDay: return "DuplicatePatientDay";
    case ErrorCode::GradeOutOfRange: return "GradeOutOfRange";
    case ErrorCode::UnknownRecistCode: return "UnknownRecistCode";
    case ErrorCode::GapFound: return "GapFound";
    case ErrorCode::RecistRegressionAfterPD: return "RecistRegressionAfterPD";
    case ErrorCode::InconsistentCohort: return "InconsistentCohort";
    case ErrorCode::UnknownCohort: return "UnknownCohort";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace cwta
