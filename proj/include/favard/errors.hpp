#pragma once

#include <stdexcept>
#include <string>

namespace favard {

/// Iteration failure or a self-check residual above its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coincident eigenvalues: the Jordan-chain regime is not supported.
class DegenerateSpectrum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Evaluation point too close to a pole of a rational function.
class PoleProximity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace favard
