#pragma once

#include <stdexcept>
#include <string>

namespace spinopt {

/// Error classes surfaced by the library. The CLI maps each to its own exit code.
enum class ErrorCategory {
  kConfig = 2,
  kBounds = 3,
  kParse = 4,
  kContract = 5,
  kNumerical = 6,
  kSimulationInput = 7,
  kDegenerateGeometry = 8,
  kIo = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::kConfig, what) {}
};

/// A value lies outside the normalized box or its physical image.
class BoundsError : public Error {
 public:
  BoundsError(const std::string& component, double value)
      : Error(ErrorCategory::kBounds,
              "component '" + component + "' out of bounds: " + std::to_string(value)),
        component_(component) {}

  const std::string& component() const noexcept { return component_; }

 private:
  std::string component_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCategory::kParse, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(ErrorCategory::kContract, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::kNumerical, what) {}
};

class SimulationInputError : public Error {
 public:
  explicit SimulationInputError(const std::string& what)
      : Error(ErrorCategory::kSimulationInput, what) {}
};

class DegenerateGeometryError : public Error {
 public:
  explicit DegenerateGeometryError(const std::string& what)
      : Error(ErrorCategory::kDegenerateGeometry, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

}  // namespace spinopt
