#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flocksim {

// Base class for all library failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: bad key, missing key, or a violated model constraint.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad argument to a numerical routine (negative radius, non-finite field, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// States that must share a grid or time sampling do not.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

// Alignment fields were built from an older kinetic state than the one in use.
class StalenessError : public Error {
 public:
  using Error::Error;
};

// A backtraced phase point carrying non-negligible mass left the velocity box;
// the velocity box (guard band) is too small for this run.
class SupportEscape : public Error {
 public:
  SupportEscape(const std::string& msg, std::vector<double> phase_point)
      : Error(msg), point(std::move(phase_point)) {}
  std::vector<double> point;  // (x..., v...) of the offending backtrace
};

// Time step too large: exponential overflow in the characteristic solve or a
// negative density after an update. Carries a suggested replacement step.
class TimestepError : public Error {
 public:
  TimestepError(const std::string& msg, double suggested)
      : Error(msg), suggested_dt(suggested) {}
  double suggested_dt;
};

// File input/output or format failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace flocksim
