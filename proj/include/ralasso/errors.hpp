#pragma once

#include <stdexcept>
#include <string>

namespace ralasso {

// Ill-shaped or inconsistent array arguments (dimension mismatches, empty data).
struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Design matrix unusable for curvature estimation (e.g. all-zero X).
struct DegenerateDesignError : std::invalid_argument {
  explicit DegenerateDesignError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Objective became non-finite during optimization; indicates a user-supplied
// step weight gamma_u below the loss curvature.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Concentration-bound preconditions violated (log(1/delta)/n > 1/8).
// Carries the minimum sample size that would make the bound applicable.
struct CalibrationError : std::runtime_error {
  CalibrationError(const std::string& msg, long min_n_required)
      : std::runtime_error(msg), min_n(min_n_required) {}
  long min_n;
};

// Restricted Gram matrix not positive definite in the oracle fit.
struct RankDeficiencyError : std::runtime_error {
  explicit RankDeficiencyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Relative-gain denominator degenerate (RA-Lasso error equals the oracle error).
struct DegenerateGainError : std::runtime_error {
  explicit DegenerateGainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; `line` is 1-based and 0 when no line applies.
struct CsvError : std::runtime_error {
  CsvError(const std::string& msg, long bad_line = 0)
      : std::runtime_error(msg), line(bad_line) {}
  long line;
};

}  // namespace ralasso
