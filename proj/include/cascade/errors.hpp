#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

// Bad arguments to a library call (dimension mismatch, out-of-range
// parameters, symbols outside an alphabet).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A frame was offered to a posterior out of time order.
class SequencingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The observation window does not contain every neighborhood the
// posterior needs for the frame's time.
class CoverageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Configuration validation failure; the message carries the field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace cascade
