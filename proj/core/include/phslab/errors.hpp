#ifndef PHSLAB_ERRORS_HPP
#define PHSLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace phslab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A precondition of an operation was violated by the caller.
struct PreconditionError : Error {
  using Error::Error;
};

// Problems with user-supplied configuration (bad keys, malformed values).
struct ConfigError : Error {
  using Error::Error;
};

// The integer matrix has an eigenvalue on the unit circle.
struct NotHyperbolicError : Error {
  using Error::Error;
};

// The perturbation size breaks the partial-hyperbolicity certificate.
struct EpsilonTooLargeError : Error {
  using Error::Error;
};

// An iterative scheme failed its Cauchy/residual test.
struct ConvergenceError : Error {
  using Error::Error;
};

// Bundle directions lost transversality (below the theta_min floor).
struct DegenerateSplittingError : Error {
  using Error::Error;
};

// Fiber extraction could not locate a point with ||H - v|| small.
struct SeedNotFoundError : Error {
  using Error::Error;
};

// Curve intersection search outcomes that the caller must handle.
struct NoIntersectionError : Error {
  using Error::Error;
};
struct MultipleIntersectionsError : Error {
  using Error::Error;
};

// Distinct chart inputs collided in the output; message carries the witness.
struct InjectivityError : Error {
  using Error::Error;
};

// Curve tracer had to shrink the step below its floor.
struct StepRejectedError : Error {
  using Error::Error;
};

}  // namespace phslab

#endif
