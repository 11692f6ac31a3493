#pragma once

#include <stdexcept>
#include <string>

namespace rear {

// Base of every error the engine raises deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: flags, config values, request bodies.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable files and other environment failures.
class IoError : public Error {
 public:
  using Error::Error;
};

// The data cannot support the requested computation (empty layer, too few
// events, no intensity data, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Lookup of a dataset/analysis that does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace rear
