#pragma once

#include <stdexcept>
#include <string>

namespace udrl {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid hyperparameters or network description. `field()` names the offender.
class ConfigError : public Error {
public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class NumericError : public Error {
public:
  using Error::Error;
};

// API misuse: stepping a finished env, sampling an empty buffer, ...
class UsageError : public Error {
public:
  using Error::Error;
};

class UnsupportedError : public Error {
public:
  using Error::Error;
};

// Malformed or incompatible checkpoint / config files.
class FormatError : public Error {
public:
  using Error::Error;
};

}  // namespace udrl
