#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace tei {

enum class ErrorCode {
  InputParse,
  InvalidArgument,
  DimensionMismatch,
  NegativeDistance,
  NonzeroDiagonal,
  DegenerateDistance,
  AsymmetricDistance,
  TriangleViolation,
  NonFinite,
  DoublingUnbounded,
  AbsoluteContinuityViolated,
  TooLargeForExact,
  SolverStall,
  EntropyInfinite,
  BoundVacuous,
  InvalidSpec,
  ScheduleNotIncreasing,
  DualPrimalGap,
  UnknownCommand,
  AssertionFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::array<long, 3> where = {-1, -1, -1});

  ErrorCode code() const noexcept { return code_; }
  // Offending indices where meaningful, e.g. (i, j, k) for a triangle violation.
  const std::array<long, 3>& where() const noexcept { return where_; }

 private:
  ErrorCode code_;
  std::array<long, 3> where_;
};

}  // namespace tei
