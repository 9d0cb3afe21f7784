#pragma once

#include <stdexcept>
#include <string>

namespace forge {

enum class ErrorKind {
  DivisionByZero,
  MixedFieldConfig,
  BoundExceedsField,
  ArityMismatch,
  SyntaxError,
  DanglingReference,
  CyclicReference,
  BudgetExceeded,
  ZeroDivisor,
  ZeroPolynomial,
  FieldTooSmall,
  SearchExhausted,
  ZeroDelta,
  NotASimpleRoot,
  AllDerivativesVanish,
  NoRationalRoot,
  ResidualNonzero,
  NoSimpleRoots,
  NoFactorFound,
  ParameterViolation,
  PreconditionFailed,
  ShapeError,
  NotAFormula,
  CharacteristicDividesPower,
  MissingArtifact,
  HashMismatch,
  InvalidArgument,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::MixedFieldConfig: return "MixedFieldConfig";
    case ErrorKind::BoundExceedsField: return "BoundExceedsField";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::CyclicReference: return "CyclicReference";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ZeroDivisor: return "ZeroDivisor";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::FieldTooSmall: return "FieldTooSmall";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::ZeroDelta: return "ZeroDelta";
    case ErrorKind::NotASimpleRoot: return "NotASimpleRoot";
    case ErrorKind::AllDerivativesVanish: return "AllDerivativesVanish";
    case ErrorKind::NoRationalRoot: return "NoRationalRoot";
    case ErrorKind::ResidualNonzero: return "ResidualNonzero";
    case ErrorKind::NoSimpleRoots: return "NoSimpleRoots";
    case ErrorKind::NoFactorFound: return "NoFactorFound";
    case ErrorKind::ParameterViolation: return "ParameterViolation";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::NotAFormula: return "NotAFormula";
    case ErrorKind::CharacteristicDividesPower: return "CharacteristicDividesPower";
    case ErrorKind::MissingArtifact: return "MissingArtifact";
    case ErrorKind::HashMismatch: return "HashMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& msg, int line = 0)
      : std::runtime_error(std::string(kind_name(k)) + ": " + msg), kind_(k), line_(line) {}

  ErrorKind kind() const { return kind_; }
  // source line for SyntaxError, 0 otherwise
  int line() const { return line_; }

 private:
  ErrorKind kind_;
  int line_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg, int line = 0) {
  throw Error(k, msg, line);
}

}  // namespace forge
