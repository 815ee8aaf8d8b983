#pragma once

#include <stdexcept>
#include <string>

namespace ordcollab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed corpus, dataset or snapshot file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or argument; maps to CLI exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a precondition (empty class, empty timeline, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or other failure while fitting a model.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace ordcollab
