#include "zsspec/errors.hpp"

namespace zs {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::AnchorNotOnContinuum: return "AnchorNotOnContinuum";
    case ErrorCode::EmptyContinuum: return "EmptyContinuum";
    case ErrorCode::PoleEvaluation: return "PoleEvaluation";
    case ErrorCode::BranchJump: return "BranchJump";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::DegenerateSurface: return "DegenerateSurface";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::StepCollapse: return "StepCollapse";
    case ErrorCode::EscapeWithoutTermination: return "EscapeWithoutTermination";
    case ErrorCode::GraphInconsistency: return "GraphInconsistency";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NegativeDensity: return "NegativeDensity";
    case ErrorCode::EvaluationOnSupport: return "EvaluationOnSupport";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::TooCloseToEndpoint: return "TooCloseToEndpoint";
    case ErrorCode::AmbiguousSide: return "AmbiguousSide";
    case ErrorCode::StalledAtStagnation: return "StalledAtStagnation";
    case ErrorCode::DeformationLeftClass: return "DeformationLeftClass";
    case ErrorCode::ClassEscape: return "ClassEscape";
    case ErrorCode::NoConvergence: return "NoConvergence";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace zs
