#pragma once

#include <stdexcept>
#include <string>

namespace adaptgear {

/// Raised for every recoverable failure in the library (bad input files,
/// violated preconditions, dimension mismatches).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adaptgear
