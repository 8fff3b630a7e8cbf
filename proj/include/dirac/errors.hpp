#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dirac {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t column, std::string token)
      : Error(msg + " at column " + std::to_string(column) + " (token \"" + token + "\")"),
        column_(column),
        token_(std::move(token)) {}

  std::size_t column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t column_;
  std::string token_;
};

class UnknownSymbolError : public Error {
 public:
  explicit UnknownSymbolError(std::string name)
      : Error("unknown symbol \"" + name + "\""), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class EvalError : public Error {
 public:
  enum class Kind { MissingCoordinate, DivisionByZero, Transcendental };
  EvalError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class ChartMismatchError : public Error {
 public:
  ChartMismatchError() : Error("operands live on different charts") {}
};

class DegreeError : public Error {
 public:
  using Error::Error;
};

// A precondition of a construction failed (not coupling, leaf condition, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace dirac
