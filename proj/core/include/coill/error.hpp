#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coill {

enum class ErrorCode {
  ParseError,
  SubstituteWithPTerm,
  IllFormed,
  VarMismatch,
  ShapeMismatch,
  RuleMismatch,
  IndexOutOfRange,
  FormulaMismatch,
  StorageShape,
  UnsupportedConnective,
  StaleRedex,
  FuelExhausted,
  SequentMismatch,
  NotMultiplicative,
  AssignmentInvalid,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// Base class of every exception thrown by the kernel.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace coill
