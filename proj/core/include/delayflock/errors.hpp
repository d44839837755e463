#pragma once

#include <stdexcept>
#include <string>

namespace delayflock {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (e.g. negative distance).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller broke an interface contract: shape mismatch, asymmetric input, ...
class ContractError : public Error {
 public:
  using Error::Error;
};

// Non-finite or otherwise unusable state values.
class StateError : public Error {
 public:
  using Error::Error;
};

// Invalid model, delay or scenario parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A query reached outside the stored history window.
class LookbackError : public Error {
 public:
  using Error::Error;
};

// Iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Threshold search endpoints do not bracket a transition.
class BracketError : public Error {
 public:
  using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace delayflock
