#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace expfact {

// Failure taxonomy shared by all pipelines. Codes are stable identifiers:
// the CLI maps them to exit codes and prints them verbatim in reports.
enum class ErrorCode {
  Config,              // invalid backend descriptor / counts
  SpaceMismatch,       // operands live on different sample spaces
  ShapeMismatch,       // matrix dimensions disagree
  UnsupportedBackend,  // operation not defined for this backend
  BadSpec,             // unparseable input file
  NotInvertible,       // element magnitude below tolerance at a sample
  NotInvertibleAtPoint,
  NumericalError,      // solver failure, overflow
  Undersampled,        // phase increment >= pi between adjacent samples
  ZeroOnPath,          // winding number of a vanishing sample sequence
  Ambiguous,           // topology query unresolvable at current resolution
  NoRayFound,          // no branch ray clears the spectrum
  BranchViolation,     // eigenvalue touches the branch cut
  NotInSigmaN,         // 0 not in the unbounded component of the complement
  NotUnipotent,
  NotDiagonal,
  NotTriangular,
  ProductNotOne,       // diagonal product differs from 1
  NonUnipotentResult,
  ScheduleExhausted,   // t / lambda search ran out of doublings
  SearchExhausted,     // shift search found no verified candidate
  CommonZero,          // column vanishes jointly at a sample
  NotLeftInvertible,
  AllLowerEntriesZero,
  NoLowerEntry,
  TopLeftNotExp1,
  SolveFailure,
  DetNotExp1,
  NotExp1,
  NotAlternating,
  NotUnitriangular,
  NotFinitePoints,
  VerificationFailed,
};

const char* error_code_name(ErrorCode code);

// scientific-notation formatting for residual magnitudes in messages
std::string format_mag(double value);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  Error(ErrorCode code, const std::string& message, std::size_t sample)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message +
                           " (sample " + std::to_string(sample) + ")"),
        code_(code),
        sample_(sample),
        has_sample_(true) {}

  ErrorCode code() const noexcept { return code_; }
  bool has_sample() const noexcept { return has_sample_; }
  std::size_t sample() const noexcept { return sample_; }

 private:
  ErrorCode code_;
  std::size_t sample_ = 0;
  bool has_sample_ = false;
};

}  // namespace expfact
