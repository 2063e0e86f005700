#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace charpent {

/// Base class for all library failures that are part of the documented
/// error contracts (as opposed to precondition violations, which throw
/// std::invalid_argument).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SymbolFailure { NonRealRoots, MultipleRoots, ZeroRoot, DegenerateRoots };

class SymbolError : public Error {
 public:
  SymbolError(SymbolFailure kind, const std::string& what) : Error(what), kind(kind) {}
  SymbolFailure kind;
};

/// Raised by the expression parser; `offset` is the 0-based character
/// position of the failure, `expected` describes the admissible tokens.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected)
      : Error("parse error at offset " + std::to_string(offset) + ": expected " + expected),
        offset(offset),
        expected(std::move(expected)) {}
  std::size_t offset;
  std::string expected;
};

enum class EvalFailure { DomainError, UnboundVariable, NonDifferentiable };

class EvalError : public Error {
 public:
  EvalError(EvalFailure kind, const std::string& what) : Error(what), kind(kind) {}
  EvalFailure kind;
};

enum class GeometryFailure { ZeroRoot, NoValidPentagon, UnsupportedOrder, BumpSupportViolation };

class GeometryError : public Error {
 public:
  GeometryError(GeometryFailure kind, const std::string& what) : Error(what), kind(kind) {}
  GeometryFailure kind;
};

enum class SolverFailure { SourceUndefined, GridTooCoarse, EmptyRegion };

class SolverError : public Error {
 public:
  SolverError(SolverFailure kind, const std::string& what) : Error(what), kind(kind) {}
  SolverFailure kind;
};

/// Instance generation exhausted its draw budget for a seed.
class InfeasibleError : public Error {
 public:
  InfeasibleError(unsigned long long seed, const std::string& what) : Error(what), seed(seed) {}
  unsigned long long seed;
};

/// Config file rejected (bad JSON, schema violation, unknown key).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace charpent
