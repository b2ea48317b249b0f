#pragma once

#include <stdexcept>
#include <string>

namespace qsched {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes and prefixes the message with component().
class Error : public std::runtime_error {
 public:
  Error(std::string component, const std::string& what)
      : std::runtime_error(what), component_(std::move(component)) {}

  const std::string& component() const noexcept { return component_; }

 private:
  std::string component_;
};

// Invalid scenario or constellation parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unknown satellite/station/pair id.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Malformed or missing weather/scenario data.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatch between parts of a problem.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Out-of-range algorithm parameter (node limit, tolerance, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Instance too large for an exact enumerative method.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Instance violates the structural preconditions of a specialised solver.
class ModeError : public Error {
 public:
  using Error::Error;
};

// Wraps an error raised while processing one simulation slot.
class SlotError : public Error {
 public:
  SlotError(int slot, const Error& inner)
      : Error(inner.component(),
              "slot " + std::to_string(slot) + ": " + inner.what()),
        slot_(slot) {}

  int slot() const noexcept { return slot_; }

 private:
  int slot_;
};

}  // namespace qsched
