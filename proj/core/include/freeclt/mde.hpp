// Solver for the operator-valued semicircular fixed point
//   b G - 1 = eta(G) G,  equivalently  G = (b - eta(G))^-1,
// the unique solution with Im G negative definite when Im b is positive
// definite. Damped fixed-point iteration from G0 = b^-1; the step factor
// starts at 1 and halves (floor 1/64) whenever the residual fails to drop.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freeclt/covariance.hpp"
#include "freeclt/matrix.hpp"

namespace freeclt {

struct MdeOptions {
  double tol = 1e-12;     // stop when ||(b - eta(G))G - 1|| <= tol
  int max_iter = 10000;
  std::optional<ComplexMatrix> initial;  // default: b^-1
};

struct MdeSolution {
  ComplexMatrix G;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> damping_trace;  // step factor at each accepted iteration
  // Set when lambda_min(Im b) < 1e-4: convergence degrades near the real axis.
  bool near_real_axis = false;
};

// Throws NoConvergence when max_iter is exhausted above tol.
MdeSolution solve_mde(const CovarianceModel& model, const OperatorPoint& point,
                      const MdeOptions& options = {});

// Closed form for the scalar case eta(g) = variance * g:
//   G(z) = (z - sqrt(z^2 - 4 variance)) / (2 variance), branch with Im G < 0.
Complex scalar_semicircle(Complex z, double variance = 1.0);

struct MdeGridEntry {
  std::optional<MdeSolution> solution;
  std::string error;  // empty on success

  bool ok() const { return solution.has_value(); }
};

// Solves every point, collecting per-point failures instead of aborting.
std::vector<MdeGridEntry> solve_mde_grid(const CovarianceModel& model,
                                         const std::vector<OperatorPoint>& points,
                                         const MdeOptions& options = {});

}  // namespace freeclt
