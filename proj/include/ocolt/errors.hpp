#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ocolt {

// Exit codes used by the CLI: 0 success, 2 configuration, 3 convergence,
// 4 slater violation.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class ValidityError : public ConfigError {
 public:
  explicit ValidityError(const std::string& what) : ConfigError(what) {}
};

class MissingConstantsError : public ConfigError {
 public:
  explicit MissingConstantsError(const std::string& what) : ConfigError(what) {}
};

// Iterative solver ran out of iterations. Carries the best iterate seen and
// the residual at that point so callers can decide whether to salvage it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_iterate,
                   double residual)
      : std::runtime_error(what),
        best_iterate_(std::move(best_iterate)),
        residual_(residual) {}

  const std::vector<double>& best_iterate() const { return best_iterate_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> best_iterate_;
  double residual_;
};

class SlaterViolationError : public std::runtime_error {
 public:
  explicit SlaterViolationError(const std::string& what)
      : std::runtime_error(what) {}
};

class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& what)
      : std::runtime_error(what) {}
};

class WrongPathError : public std::logic_error {
 public:
  explicit WrongPathError(const std::string& what) : std::logic_error(what) {}
};

class IncompleteTraceError : public std::runtime_error {
 public:
  explicit IncompleteTraceError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace ocolt
