#pragma once

#include <stdexcept>
#include <string>

namespace dynassign {

// Base class for all engine errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// An event or query referenced an id that was never created.
class UnknownIdError : public Error {
 public:
  explicit UnknownIdError(const std::string& msg) : Error(msg) {}
};

// An event or query addressed a node or edge that is not alive.
class DeadTargetError : public Error {
 public:
  explicit DeadTargetError(const std::string& msg) : Error(msg) {}
};

// A consumer-add event carried the wrong number of distances.
class ArityMismatchError : public Error {
 public:
  explicit ArityMismatchError(const std::string& msg) : Error(msg) {}
};

// Malformed event relative to the model rules (e.g. a second demand for a
// producer that already consumed its one-shot demand).
class InvalidEventError : public Error {
 public:
  explicit InvalidEventError(const std::string& msg) : Error(msg) {}
};

// Trace file could not be parsed or is internally inconsistent.
class TraceInvalidError : public Error {
 public:
  explicit TraceInvalidError(const std::string& msg) : Error(msg) {}
};

// Generator configuration violates its invariants.
class ConfigInvalidError : public Error {
 public:
  explicit ConfigInvalidError(const std::string& msg) : Error(msg) {}
};

// A solve result without a dual certificate was asked for a certificate check.
class MissingCertificateError : public Error {
 public:
  explicit MissingCertificateError(const std::string& msg) : Error(msg) {}
};

// Numeric-domain violation (e.g. ratio bound with d_min = 0).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Distance-attack generator found no weighted edge to strike.
class NoWeightedEdgeError : public Error {
 public:
  explicit NoWeightedEdgeError(const std::string& msg) : Error(msg) {}
};

// Failure-storm generator could not keep the trace feasible.
class CannotKeepFeasibleError : public Error {
 public:
  explicit CannotKeepFeasibleError(const std::string& msg) : Error(msg) {}
};

}  // namespace dynassign
