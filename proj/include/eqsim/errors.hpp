#pragma once

#include <stdexcept>
#include <string>

namespace eqsim {

/// Numerical result failed its internal accuracy contract (e.g. grid
/// refinement did not converge).
class accuracy_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A truncated window or series would silently lose probability.
class truncation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eqsim
