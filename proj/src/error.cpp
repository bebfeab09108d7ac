#include "exch/error.hpp"

namespace exch {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::CycleDetected: return "cycle-detected";
    case ErrorCode::UnknownNode: return "unknown-node";
    case ErrorCode::DuplicateEdge: return "duplicate-edge";
    case ErrorCode::OverlappingSets: return "overlapping-sets";
    case ErrorCode::UnknownName: return "unknown-name";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::QuotaUnreachable: return "quota-unreachable";
    case ErrorCode::EmptyGroup: return "empty-group";
    case ErrorCode::EmptyCell: return "empty-cell";
    case ErrorCode::PositivityViolation: return "positivity-violation";
    case ErrorCode::InvalidPrior: return "invalid-prior";
    case ErrorCode::NonFiniteTarget: return "non-finite-target";
    case ErrorCode::DegenerateStep: return "degenerate-step";
    case ErrorCode::McmcFailure: return "mcmc-failure";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace exch
