#pragma once

#include <stdexcept>
#include <string>

namespace eed2d {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

/// No point satisfies the QoS constraints (for the current beams, time switch, or budget).
struct Infeasible : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  using Error::Error;
};

/// The barrier solver was started on or outside the constraint boundary.
struct NotStrictlyFeasible : Error {
  using Error::Error;
};

struct LineSearchStall : Error {
  using Error::Error;
};

struct AllZeroBeams : Error {
  using Error::Error;
};

}  // namespace eed2d
