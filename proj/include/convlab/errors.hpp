#pragma once

#include <stdexcept>
#include <string>

namespace convlab {

/// A hard cap (point count, triple count, constraint count) was exceeded.
class SizeLimitError : public std::runtime_error {
 public:
  explicit SizeLimitError(const std::string& what) : std::runtime_error(what) {}
};

/// An object was used together with a domain it does not belong to.
class DomainMismatchError : public std::runtime_error {
 public:
  explicit DomainMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// An evaluator produced a non-finite value, or was called outside its domain.
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input: mismatched dimensions, bad parameter combination, etc.
class ParameterError : public std::runtime_error {
 public:
  explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

/// The LP solver gave up (iteration cap) or was handed an ill-formed program.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A stated precondition does not hold (e.g. 0 not interior to the domain).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// An oracle handed to an iterative scheme violated its contract.
class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace convlab
