#pragma once

#include <stdexcept>
#include <string>

namespace ipsforge
{

enum class ErrorKind
{
  NonPrimeModulus,
  IndexOutOfField,
  MissingAssignment,
  ExpansionBudgetExceeded,
  DepthBudgetExceeded,
  DegreeBudgetExceeded,
  BudgetExceeded,
  NotNormalForm,
  DoesNotFit,
  FieldTooLargeForUnary,
  WidthMismatch,
  DimensionError,
  Unsupported,
  ArityMismatch,
  BadJustification,
  IncompleteCaseCover,
  FieldMismatch,
  ParseError
};

inline const char* to_string( ErrorKind kind )
{
  switch ( kind )
  {
  case ErrorKind::NonPrimeModulus: return "NonPrimeModulus";
  case ErrorKind::IndexOutOfField: return "IndexOutOfField";
  case ErrorKind::MissingAssignment: return "MissingAssignment";
  case ErrorKind::ExpansionBudgetExceeded: return "ExpansionBudgetExceeded";
  case ErrorKind::DepthBudgetExceeded: return "DepthBudgetExceeded";
  case ErrorKind::DegreeBudgetExceeded: return "DegreeBudgetExceeded";
  case ErrorKind::BudgetExceeded: return "BudgetExceeded";
  case ErrorKind::NotNormalForm: return "NotNormalForm";
  case ErrorKind::DoesNotFit: return "DoesNotFit";
  case ErrorKind::FieldTooLargeForUnary: return "FieldTooLargeForUnary";
  case ErrorKind::WidthMismatch: return "WidthMismatch";
  case ErrorKind::DimensionError: return "DimensionError";
  case ErrorKind::Unsupported: return "Unsupported";
  case ErrorKind::ArityMismatch: return "ArityMismatch";
  case ErrorKind::BadJustification: return "BadJustification";
  case ErrorKind::IncompleteCaseCover: return "IncompleteCaseCover";
  case ErrorKind::FieldMismatch: return "FieldMismatch";
  case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error
{
public:
  Error( ErrorKind kind, const std::string& message )
      : std::runtime_error( std::string( to_string( kind ) ) + ": " + message ), kind_( kind )
  {
  }

  ErrorKind kind() const noexcept { return kind_; }

  /*! \brief True for the budget family (mapped to exit code 2 by the CLI). */
  bool is_budget() const noexcept
  {
    return kind_ == ErrorKind::ExpansionBudgetExceeded || kind_ == ErrorKind::DepthBudgetExceeded ||
           kind_ == ErrorKind::DegreeBudgetExceeded || kind_ == ErrorKind::BudgetExceeded;
  }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail( ErrorKind kind, const std::string& message )
{
  throw Error( kind, message );
}

} // namespace ipsforge
