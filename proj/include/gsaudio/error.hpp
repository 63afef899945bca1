#pragma once

#include <stdexcept>
#include <string>

namespace gsaudio {

/// Base of every error the engine raises. The CLI maps the concrete type to
/// an exit code (see tools/gsaudio.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (shape mismatch, bad width).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value (percentile out of range, non-COLA STFT, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A file parsed but is missing a required field. `field()` names it.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Non-finite or otherwise unusable values in input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Positions outside a room, coincident points, rooms too small.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// An impulse-response metric cannot be computed (decay range not reached).
class MetricUndefined : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or function value during optimization.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures; the message always carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsaudio
