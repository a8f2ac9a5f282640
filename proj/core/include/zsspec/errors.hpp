#pragma once

#include <stdexcept>
#include <string>

namespace zs {

enum class ErrorCode {
  InvalidInput,
  AnchorNotOnContinuum,
  EmptyContinuum,
  PoleEvaluation,
  BranchJump,
  QuadratureFailure,
  NewtonDivergence,
  DegenerateSurface,
  NotCritical,
  StepCollapse,
  EscapeWithoutTermination,
  GraphInconsistency,
  DegenerateSpectrum,
  IllConditioned,
  NegativeDensity,
  EvaluationOnSupport,
  GridTooCoarse,
  FieldMismatch,
  CountMismatch,
  TooCloseToEndpoint,
  AmbiguousSide,
  StalledAtStagnation,
  DeformationLeftClass,
  ClassEscape,
  NoConvergence,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// CLI can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace zs
