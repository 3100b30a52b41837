#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsecs {

enum class ErrorCode {
  DimensionMismatch,
  NonPositiveParameter,
  NonFiniteData,
  NegativeWeight,
  InvalidProgram,
  BackendFailure,
  InfeasibleInstance,
  NodeInfeasible,
  DegenerateInstance,
  NoFeasibleCompletion,
  SingularSchurComplement,
  ProblemTooLarge,
  CompletePattern,
  EmptyPool,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sparsecs
