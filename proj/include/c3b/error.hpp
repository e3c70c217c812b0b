// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace c3b {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Requested problem size exceeds a configured limit.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (no bracket, singular solve, no convergence).
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Near-grazing incidence makes the linearized reflection singular.
class GrazingError : public NumericError {
public:
  using NumericError::NumericError;
};

/// The numerical rank of a contour moment could not be decided.
class AmbiguousRankError : public NumericError {
public:
  using NumericError::NumericError;
};

/// Malformed configuration or command line.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A persisted file does not match its schema.
class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace c3b
