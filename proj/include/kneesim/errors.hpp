#pragma once

#include <stdexcept>
#include <string>

namespace kneesim {

// Invalid configuration or malformed config document. Carries a line number
// when raised by the config parser (0 = not tied to a document line).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
  ConfigError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

// A window decision was requested with no feedback signals accumulated.
// Callers keep the window unchanged when they see this.
class NoSignalError : public std::runtime_error {
 public:
  NoSignalError() : std::runtime_error("no feedback signals accumulated") {}
};

}  // namespace kneesim
