#pragma once

#include <stdexcept>
#include <string>

namespace levtest {

/// Raised when a statistic is undefined for the data at hand (0/0 ratios,
/// zero group variance, all deviations equal). Callers that tally results,
/// such as the simulation harness, count these instead of propagating them.
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The kurtosis correction factor 2/(g2 - 1) is undefined or negative.
class KurtosisCorrectionError : public DegenerateDataError {
 public:
  using DegenerateDataError::DegenerateDataError;
};

}  // namespace levtest
