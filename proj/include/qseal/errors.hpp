#pragma once

#include <stdexcept>
#include <string>

namespace qseal {

/// Argument outside the mathematical domain of an operation (angles, factors, counts).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation called on a photon state kind it does not model.
class UnsupportedStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Component or scenario configuration violates an invariant. Raised at
/// construction/load time, never mid-run.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke a documented precondition (unsorted streams, missing baseline).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Too few central coincidences to estimate visibility.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qseal
