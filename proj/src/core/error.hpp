#pragma once

#include <stdexcept>
#include <string>

namespace mgower {

// Base for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration (caller mistake).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Schema file malformed, or a CSV header that does not agree with it.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Input data violates a contract (unknown category, all-missing row, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// No valid variable for a pair, or a recipient with no defined donor.
class UndefinedDistanceError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace mgower
