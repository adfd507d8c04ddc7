#pragma once

#include <stdexcept>
#include <string>

namespace xpci {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad input: violated precondition, mismatched grids, schema violation.
/// The CLI maps this to exit code 2.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A well-formed request that cannot be evaluated (e.g. a transfer-function
/// denominator vanishing at some spatial frequency). CLI exit code 3.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Raster or sidecar problems. Each subclass names one distinct failure.
class FormatError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class TruncatedPayloadError : public FormatError {
public:
  TruncatedPayloadError(std::size_t expected, std::size_t actual)
      : FormatError("truncated payload: expected " + std::to_string(expected) +
                    " bytes, found " + std::to_string(actual)),
        expected_bytes(expected), actual_bytes(actual) {}
  std::size_t expected_bytes;
  std::size_t actual_bytes;
};

class ChecksumError : public FormatError {
public:
  using FormatError::FormatError;
};

class SchemaError : public FormatError {
public:
  SchemaError(std::string key_path, const std::string& what)
      : FormatError(key_path + ": " + what), key(std::move(key_path)) {}
  std::string key;
};

} // namespace xpci
