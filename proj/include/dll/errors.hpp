#pragma once

#include <stdexcept>
#include <string>

namespace dll {

// Schedule quantity requested at a point where it diverges (sigma_t = 0 or
// alpha_t = 0 at an exact endpoint).
struct DivergenceError : std::domain_error {
  explicit DivergenceError(const std::string& msg) : std::domain_error(msg) {}
};

// Argument outside its documented domain (t outside [0,1], fraction outside
// (0,1), n too small, ...).
struct RangeError : std::invalid_argument {
  explicit RangeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Time points passed in the wrong order (requires s <= t).
struct OrderingError : std::invalid_argument {
  explicit OrderingError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct DimensionError : std::invalid_argument {
  explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite value encountered mid-run; message carries the diagnostic
// (step, t-range, loss value).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dll
