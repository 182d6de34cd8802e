#pragma once

#include <stdexcept>
#include <string>

namespace siqs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside its admissible range. `field()` names it.
class RangeError : public Error {
 public:
  RangeError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class SubpopulationTooSmall : public Error {
 public:
  using Error::Error;
};

class CountExceedsPopulation : public Error {
 public:
  using Error::Error;
};

class DeadState : public Error {
 public:
  using Error::Error;
};

class BackbonePresent : public Error {
 public:
  using Error::Error;
};

class DegenerateCoverage : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class NegativeDiscriminant : public Error {
 public:
  using Error::Error;
};

class MonotonicityViolated : public Error {
 public:
  using Error::Error;
};

class NotBracketed : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace siqs
