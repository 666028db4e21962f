#include "liouville/errors.hpp"

namespace liouville {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Arity: return "ArityError";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::ChartExit: return "ChartExit";
    case ErrorKind::EmptySampleSet: return "EmptySampleSet";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::EnergyIncrease: return "EnergyIncrease";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

ParseError::ParseError(const std::string& m, int line, int column)
    : Error(ErrorKind::Parse, m + " (line " + std::to_string(line) + ", column " +
                                  std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(const std::string& m, std::string offending_name)
    : Error(ErrorKind::Validation, m), name_(std::move(offending_name)) {}

}  // namespace liouville
