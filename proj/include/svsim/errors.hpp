#pragma once

#include <stdexcept>
#include <string>

namespace svsim {

/// Error raised while reading the textual circuit format; carries the
/// 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Raised when a calibration corpus is unusable (empty, underdetermined,
/// or missing a gate class).
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace svsim
