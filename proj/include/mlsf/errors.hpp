#pragma once

#include <stdexcept>
#include <string>

namespace mlsf {

// Root of the library's exception hierarchy. The CLI maps each subclass to a
// distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A game tensor violates a structural invariant (range, shape, unique best
// response).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The game generator exhausted its resample budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The follower could not commit a best-response table, or was updated after
// committing.
class CommitError : public Error {
 public:
  using Error::Error;
};

// A parameter schedule produced an unusable value.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

// A tensor would exceed the joint-action size cap.
class CapError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration is malformed; the message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlsf
