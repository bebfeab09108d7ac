#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace exch {

enum class ErrorCode {
  InvalidParameter,
  CycleDetected,
  UnknownNode,
  DuplicateEdge,
  OverlappingSets,
  UnknownName,
  ParseError,
  QuotaUnreachable,
  EmptyGroup,
  EmptyCell,
  PositivityViolation,
  InvalidPrior,
  NonFiniteTarget,
  DegenerateStep,
  McmcFailure,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library is reported through this type; the code lets
// front ends map failures onto exit statuses without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace exch
