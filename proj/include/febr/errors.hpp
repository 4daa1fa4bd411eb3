#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace febr {

// invalid arguments are reported with std::invalid_argument

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A persisted artifact was produced under a different configuration.
class ConfigMismatch : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class MissingArtifact : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(double residual, int iterations)
      : std::runtime_error("value iteration did not converge after " + std::to_string(iterations) +
                           " sweeps (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class TrainingError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SessionOver : public std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace febr
