#pragma once

#include <stdexcept>
#include <string>

namespace gclab {

// A caller violated a documented precondition (bad parameters, bad grid,
// unsupported configuration). The CLI maps this to exit code 1.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation could not deliver its contract: non-convergence, blow-up,
// support violation detected on the data.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

}  // namespace gclab
