#pragma once

#include <stdexcept>
#include <string>

namespace macc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed parameters, labels or configuration values.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Configuration file could not be parsed or failed schema checks.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A two-level formula was evaluated at gamma_i == gamma_j.
class Singularity : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// No design satisfies the memory constraint.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// A user could not recover a demanded packet. Always a construction bug.
class DecodeFailure : public Error {
 public:
  using Error::Error;
};

/// Subpacketization or grid size above the configured guardrail.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace macc
