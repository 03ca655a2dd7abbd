// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace freeclt {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument matrix is not in the open matrix upper half-plane
// (imaginary part not positive definite, or below the strictness floor).
struct NotInUpperHalfPlane : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Model lacks the fourth-moment tensor needed for the requested quantity.
struct MissingFourthMoments : Error {
  using Error::Error;
};

// Iteration exhausted max_iter; carries the best residual seen.
struct NoConvergence : Error {
  NoConvergence(const std::string& what, int iterations_, double best_residual_)
      : Error(what), iterations(iterations_), best_residual(best_residual_) {}
  int iterations = 0;
  double best_residual = 0.0;
};

// Neumann series would not converge: L_n * ||b^-1|| exceeds the safety ratio.
struct ContractionViolated : Error {
  ContractionViolated(const std::string& what, double ratio_) : Error(what), ratio(ratio_) {}
  double ratio = 0.0;
};

// Requested order exceeds what the engine (or the stored cumulants) supports.
struct OrderTooLarge : Error {
  using Error::Error;
};

// Two sampled functions were combined over different grids.
struct GridMismatch : Error {
  using Error::Error;
};

// Scalar root finder failed; carries the last iterate.
struct RootNotFound : Error {
  RootNotFound(const std::string& what, double last_re, double last_im)
      : Error(what), last_real(last_re), last_imag(last_im) {}
  double last_real = 0.0;
  double last_imag = 0.0;
};

// Too few usable records for a regression or summary statistic.
struct InsufficientData : Error {
  using Error::Error;
};

}  // namespace freeclt
