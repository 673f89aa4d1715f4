#pragma once

#include <stdexcept>
#include <string>

namespace psh {

enum class ErrorKind {
  MalformedDocument,
  MissingField,
  ValidationFailed,
  GridExcludesBoundary,
  NumericalFailure,
  FractionalBinaries,
  InfeasibleSchedule,
  BoundaryContract,
  ModeDisabled,
  NoFeasiblePath,
  DecompositionFailure,
  LimitsExceeded,
  Infeasible,
  BudgetExceeded,
  InvalidArgument,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind), detail_(what) {}
  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::GridExcludesBoundary: return "GridExcludesBoundary";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::FractionalBinaries: return "FractionalBinaries";
    case ErrorKind::InfeasibleSchedule: return "InfeasibleSchedule";
    case ErrorKind::BoundaryContract: return "BoundaryContract";
    case ErrorKind::ModeDisabled: return "ModeDisabled";
    case ErrorKind::NoFeasiblePath: return "NoFeasiblePath";
    case ErrorKind::DecompositionFailure: return "DecompositionFailure";
    case ErrorKind::LimitsExceeded: return "LimitsExceeded";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace psh
