#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace noisewalk {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A product or query left the precomputed ball of a presentation backend.
class OutOfBallError : public Error {
 public:
  using Error::Error;
};

/// A table or flow network would exceed the configured size cap.
class CapExceededError : public Error {
 public:
  CapExceededError(const std::string& what, std::uint64_t projected)
      : Error(what), projected_(projected) {}
  std::uint64_t projected() const noexcept { return projected_; }

 private:
  std::uint64_t projected_;
};

/// A stopping level was not reached within the sampled horizon.
class HorizonExhaustedError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis of a limit law (centering, alpha < speed, ...) does not hold.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Configuration text could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace noisewalk
