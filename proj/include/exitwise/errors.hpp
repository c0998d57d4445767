#pragma once

#include <stdexcept>
#include <string>

namespace exitwise {

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter violates an operation's precondition.
struct InvalidArgument : Error {
  using Error::Error;
};

/// A series loop ran past SeriesParams::max_terms without reaching a decision.
/// The samplers never fall back to a truncated approximation.
struct AbortMaxTerms : Error {
  using Error::Error;
};

/// Quadrature of the drift failed to converge on the interval.
struct NonIntegrableDrift : Error {
  using Error::Error;
};

/// The supplied shift rho leaves (mu^2 + mu')/2 + rho negative somewhere.
struct NegativeGamma : Error {
  using Error::Error;
};

/// The plain exit sampler was asked to run with rho > 0.
struct RhoNotZero : Error {
  using Error::Error;
};

/// The Euler reference simulation hit its step cap.
struct MaxStepsExceeded : Error {
  using Error::Error;
};

/// Malformed drift expression.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace exitwise
