#pragma once

#include <stdexcept>
#include <string>

namespace winhopf {

/// Failure categories surfaced by the library. The string form is part of the
/// CLI contract and appears verbatim in error messages.
enum class ErrorCode {
  not_invertible,
  root_margin,
  not_matching,
  not_unimodular_at_0,
  not_strictly_proper,
  backend_unsupported,
  shift_off_grid,
  backend_mismatch,
  precondition,
  rank_ambiguous,
  schema,
};

inline const char* error_id(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_invertible: return "E_NOT_INVERTIBLE";
    case ErrorCode::root_margin: return "E_ROOT_MARGIN";
    case ErrorCode::not_matching: return "E_NOT_MATCHING";
    case ErrorCode::not_unimodular_at_0: return "E_NOT_UNIMODULAR_AT_0";
    case ErrorCode::not_strictly_proper: return "E_NOT_STRICTLY_PROPER";
    case ErrorCode::backend_unsupported: return "E_BACKEND_UNSUPPORTED";
    case ErrorCode::shift_off_grid: return "E_SHIFT_OFF_GRID";
    case ErrorCode::backend_mismatch: return "E_BACKEND_MISMATCH";
    case ErrorCode::precondition: return "E_PRECONDITION";
    case ErrorCode::rank_ambiguous: return "E_RANK_AMBIGUOUS";
    case ErrorCode::schema: return "E_SCHEMA";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_id(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* id() const { return error_id(code_); }

  /// Schema errors are input problems; everything else is a mathematical
  /// precondition failure.
  bool is_input_error() const { return code_ == ErrorCode::schema; }

 private:
  ErrorCode code_;
};

}  // namespace winhopf
