#pragma once

#include <stdexcept>
#include <string>

namespace thetalab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (shape, range, positivity).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Integer matrix with zero determinant where a lattice was expected.
class DegenerateLattice : public Error {
 public:
  using Error::Error;
};

/// The requested truncation error needs a radius beyond the configured cap.
class PrecisionUnreachable : public Error {
 public:
  using Error::Error;
};

/// Instance outside the supported family (e.g. gcd(m, N) != 1 for h-type laws).
class UnsupportedInstance : public Error {
 public:
  using Error::Error;
};

/// Every sample evaluated to (numerically) zero; resample with another seed.
class DegenerateSampling : public Error {
 public:
  using Error::Error;
};

/// Least-squares or quadrature routine failed to produce a trustworthy result.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace thetalab
