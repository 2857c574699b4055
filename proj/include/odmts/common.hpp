#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace odmts {

// Absolute tolerance for all cost/duration comparisons (classification,
// argmin membership, reduction thresholds). Applied symmetrically.
inline constexpr double kEps = 1e-9;

inline bool approx_eq(double a, double b, double eps = kEps) {
  return std::fabs(a - b) <= eps;
}
// a < b beyond tolerance
inline bool definitely_less(double a, double b, double eps = kEps) {
  return a < b - eps;
}
// a <= b within tolerance
inline bool leq_tol(double a, double b, double eps = kEps) {
  return a <= b + eps;
}

// Relative comparison used when checking objectives against references.
inline bool rel_close(double a, double b, double rel = 1e-6) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= rel * scale;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad instance files, inconsistent options, schema errors.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A guard tripped: enumeration cap, design-space cap, projected model size.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

// Backend failures and solves that end without a usable solution.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace odmts
