#pragma once

#include <stdexcept>
#include <string>

namespace lottery {

enum class Err {
  EmptyGroups,
  NonPositive,
  DemandNotExceedingSupply,
  ParamViolation,
  InsufficientTotal,
  ActionOutOfRange,
  TooLarge,
  StateSpaceTooLarge,
  DecompositionFailed,
  Domain,
  Config,
  Internal,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::EmptyGroups: return "EMPTY_GROUPS";
    case Err::NonPositive: return "NONPOSITIVE";
    case Err::DemandNotExceedingSupply: return "DEMAND_NOT_EXCEEDING_SUPPLY";
    case Err::ParamViolation: return "PARAM_VIOLATION";
    case Err::InsufficientTotal: return "INSUFFICIENT_TOTAL";
    case Err::ActionOutOfRange: return "ACTION_OUT_OF_RANGE";
    case Err::TooLarge: return "TOO_LARGE";
    case Err::StateSpaceTooLarge: return "STATE_SPACE_TOO_LARGE";
    case Err::DecompositionFailed: return "DECOMPOSITION_FAILED";
    case Err::Domain: return "DOMAIN";
    case Err::Config: return "CONFIG";
    case Err::Internal: return "INTERNAL";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Err code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace lottery
