#pragma once

#include <stdexcept>
#include <string>

namespace gcf {

/// Raised when a computation produces non-finite values, diverges, or hits a
/// singular system. Invalid arguments use std::invalid_argument instead.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gcf
