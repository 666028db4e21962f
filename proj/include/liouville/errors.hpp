#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liouville {

enum class ErrorKind {
  Domain,
  Arity,
  NotPositiveDefinite,
  ChartExit,
  EmptySampleSet,
  PreconditionFailed,
  RankDeficient,
  Parse,
  Validation,
  Io,
  EnergyIncrease,
};

std::string_view to_string(ErrorKind kind);

/// Base class of every error raised by the engine. The kind tag lets
/// reports name the failure without RTTI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorKind::Domain, m) {}
};

class ArityError : public Error {
 public:
  explicit ArityError(const std::string& m) : Error(ErrorKind::Arity, m) {}
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string& m)
      : Error(ErrorKind::NotPositiveDefinite, m) {}
};

class ChartExit : public Error {
 public:
  explicit ChartExit(const std::string& m) : Error(ErrorKind::ChartExit, m) {}
};

class EmptySampleSet : public Error {
 public:
  explicit EmptySampleSet(const std::string& m)
      : Error(ErrorKind::EmptySampleSet, m) {}
};

class PreconditionFailed : public Error {
 public:
  explicit PreconditionFailed(const std::string& m)
      : Error(ErrorKind::PreconditionFailed, m) {}
};

class RankDeficient : public Error {
 public:
  explicit RankDeficient(const std::string& m)
      : Error(ErrorKind::RankDeficient, m) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& m, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& m, std::string offending_name);
  const std::string& offending_name() const noexcept { return name_; }

 private:
  std::string name_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::Io, m) {}
};

class EnergyIncrease : public Error {
 public:
  explicit EnergyIncrease(const std::string& m)
      : Error(ErrorKind::EnergyIncrease, m) {}
};

}  // namespace liouville
