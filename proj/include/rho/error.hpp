#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rho {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments, configs or specs (bad weights, empty label set, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A prober produced an outcome outside the declared outcome space. This
/// signals a mis-specified scenario, never a sampling fluke.
class OutOfSupport : public Error {
 public:
  OutOfSupport(std::uint64_t trial_index, const std::string& what)
      : Error("trial " + std::to_string(trial_index) + ": " + what),
        trial_index_(trial_index) {}

  std::uint64_t trial_index() const noexcept { return trial_index_; }

 private:
  std::uint64_t trial_index_;
};

/// Probability is undefined for an empty trial series.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

class TooFewRecords : public Error {
 public:
  using Error::Error;
};

class WrongSpaceKind : public Error {
 public:
  using Error::Error;
};

/// Raised by the classifier when the stabilization test could not reach a
/// verdict (n below the configured minimum).
class InconclusiveInput : public Error {
 public:
  using Error::Error;
};

class FavorableExceedsTotal : public Error {
 public:
  using Error::Error;
};

class EnumerationTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace rho
