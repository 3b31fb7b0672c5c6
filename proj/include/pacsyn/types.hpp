#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pacsyn {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

/// Set of atomic propositions, one bit per proposition index.
using Letter = std::uint64_t;

inline constexpr std::size_t kMaxPropositions = 20;
inline constexpr std::size_t kMaxActions = 64;

/// Dense membership mask over a state space.
using StateSet = std::vector<char>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (unknown index, T = 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a precondition that the type system cannot express.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NoDataError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(line == 0 ? what
                        : what + " (line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

inline std::size_t count(const StateSet& set) {
  std::size_t n = 0;
  for (char c : set) n += c != 0;
  return n;
}

}  // namespace pacsyn
