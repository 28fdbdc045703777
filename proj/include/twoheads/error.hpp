#pragma once

#include <stdexcept>
#include <string>

namespace twoheads {

// Root of every error the library throws. The subclasses map onto the
// failure categories callers (and the CLI exit codes) distinguish.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A label is missing from a set that needs both classes.
class StratificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace twoheads
