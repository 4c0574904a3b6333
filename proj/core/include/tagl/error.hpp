#pragma once

#include <stdexcept>
#include <string>

namespace tagl {

// Base for every error raised by the library. Callers that only care about
// "something went wrong in tagl" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input layout: ragged CSV rows, bad headers, truncated files.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Values that contradict a declared or inferred schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A metric whose denominator is zero (no scorable targets).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Optimisation produced non-finite values.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Violated precondition on an argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace tagl
