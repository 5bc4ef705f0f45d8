#include "tei/error.hpp"

namespace tei {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InputParse: return "InputParse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::DegenerateDistance: return "DegenerateDistance";
    case ErrorCode::AsymmetricDistance: return "AsymmetricDistance";
    case ErrorCode::TriangleViolation: return "TriangleViolation";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DoublingUnbounded: return "DoublingUnbounded";
    case ErrorCode::AbsoluteContinuityViolated: return "AbsoluteContinuityViolated";
    case ErrorCode::TooLargeForExact: return "TooLargeForExact";
    case ErrorCode::SolverStall: return "SolverStall";
    case ErrorCode::EntropyInfinite: return "EntropyInfinite";
    case ErrorCode::BoundVacuous: return "BoundVacuous";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ScheduleNotIncreasing: return "ScheduleNotIncreasing";
    case ErrorCode::DualPrimalGap: return "DualPrimalGap";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::AssertionFailure: return "AssertionFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, std::array<long, 3> where)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), where_(where) {}

}  // namespace tei
