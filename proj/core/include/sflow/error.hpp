#pragma once

#include <stdexcept>
#include <string>

namespace sflow {

enum class ErrorKind {
  NotPrimitive,
  ZeroRow,
  LengthOverflow,
  WindowOverrun,
  InadmissibleWord,
  MissingEntry,
  NoConvergence,
  DimensionCap,
  RootBracketFailure,
  EnumerationCap,
  DegenerateVariance,
  OutsideGammaG,
  NotReducible,
  NearPole,
  NewtonDivergence,
  CalibrationAmbiguous,
  ZeroHits,
  TailDominates,
  QuadratureFailure,
  FamilyContractViolated,
  ParseError,
  ValidationError,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sflow
