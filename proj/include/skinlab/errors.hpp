#pragma once

#include <stdexcept>
#include <string>

namespace skinlab {

/// Base class for all skinlab errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad run configuration (unknown key, wrong type, out-of-range value).
struct ConfigError : Error {
  using Error::Error;
};

/// Invalid lattice geometry request (L = 0, unknown shape, empty cell set).
struct GeometryError : Error {
  using Error::Error;
};

/// Problem size exceeds a configured solver cap.
struct CapacityError : Error {
  using Error::Error;
};

/// Dense eigensolver failed to converge or produced an eigenpair whose
/// residual exceeds the enforcement bound. `index` is the offending
/// eigenpair, or -1 when the failure is global.
struct SolverError : Error {
  explicit SolverError(const std::string& what, long index = -1)
      : Error(what), index(index) {}
  long index;
};

/// An operation precondition does not hold (missing eigenvectors,
/// off-contour incident momentum, empty energy window, ...).
struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace skinlab
