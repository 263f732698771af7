#pragma once

#include <stdexcept>
#include <string>

namespace active {

// Invalid tuning parameter or malformed configuration supplied by the caller.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A statistic or data value fell outside its admissible domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The null density evaluated below eta * lower_bound inside its certified
// domain; the lower bound is stale.
class InconsistentDensityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Not enough data to fit a density or conditional CDF.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rank-deficient design matrix or singular Jacobian block.
class SingularDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misconfigured strategy: exhausted iterate generator, update rule touching
// processed hypotheses, chooser picking a processed index.
class ConfigurationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input file.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace active
