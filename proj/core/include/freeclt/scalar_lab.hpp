// Scalar (N = 1) reference laboratory: closed-form one-variable laws with
// known R-transforms, the Cauchy transform of their free convolution powers
//   z = 1/G + sqrt(n) R(G / sqrt(n)),  Im G < 0,
// and density utilities (Stieltjes inversion at height epsilon, Kolmogorov
// and Levy distances between sampled densities).
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "freeclt/cumulants.hpp"
#include "freeclt/matrix.hpp"

namespace freeclt {

using ScalarFn = std::function<Complex(Complex)>;

struct ScalarFamily {
  std::string name;
  ScalarFn r_transform;      // R(w) = kappa_2 w + kappa_3 w^2 + ...
  ScalarFn r_derivative;     // dR/dw, used by the Newton solver
  double variance = 1.0;     // kappa_2
  NormBoundFn norm_bound_fn; // certified bound on ||S_n||
  // kappa_2 .. kappa_{M_max}; real for the shipped laws.
  std::vector<double> cumulant_list;
  bool symmetric = false;    // all odd cumulants vanish
  int M_max = 16;
  // Branch data for the solver: the two-atom R(w) is built from a square
  // root u = sqrt((1 + gamma w)^2 + 4 w^2) whose sign must be tracked along
  // solver paths; entire_r means R has no branch point (semicircle).
  bool entire_r = false;
  double gamma = 0.0;

  double kappa(int order) const {  // order >= 2
    return cumulant_list[static_cast<std::size_t>(order - 2)];
  }
  double third_moment() const { return kappa(3); }
  double fourth_moment() const { return kappa(4) + 2.0 * variance * variance; }
};

// Semicircle law of the given variance: R(w) = variance * w.
ScalarFamily make_semicircle_family(double variance = 1.0);

// Symmetric Bernoulli (atoms at +-1): R(w) = (sqrt(1 + 4 w^2) - 1) / (2 w).
ScalarFamily make_bernoulli_family();

// Centered unit-variance two-point law: atom sqrt(q/p) with weight p and
// atom -sqrt(p/q) with weight q = 1 - p. Skewed for p != 1/2.
ScalarFamily make_two_point_family(double p);

// Scalar model + cumulant words for the engine-side of the dual evaluation.
CumulantFamily to_cumulant_family(const ScalarFamily& fam);

// Root of z = 1/G + sqrt(n) R(G/sqrt(n)) with Im G < 0; damped Newton from
// G0 = 1/z, imaginary-axis bisection for symmetric laws, then continuation
// from high imaginary part. Throws RootNotFound (carries the last iterate).
Complex free_power_cauchy(const ScalarFamily& fam, int n, Complex z);

struct ScalarDensity {
  std::vector<double> grid;
  std::vector<double> values;
  double epsilon = 0.0;
  double max_clip = 0.0;  // largest negative excursion clipped to zero
};

// values[j] = max(0, -Im cauchy(x_j + i epsilon) / pi).
ScalarDensity stieltjes_invert(const ScalarFn& cauchy, const std::vector<double>& grid,
                               double epsilon);

// Uniform grid helper, count points from lo to hi inclusive.
std::vector<double> make_grid(double lo, double hi, int count);

// Trapezoid cumulative distribution, F[0] = 0.
std::vector<double> cdf_values(const ScalarDensity& density);

// Trapezoid total mass.
double density_mass(const ScalarDensity& density);

// sup_j |F_a(x_j) - F_b(x_j)| on the shared grid. Throws GridMismatch.
double kolmogorov_distance(const ScalarDensity& a, const ScalarDensity& b);

// Smallest h >= 0 with F_a(x-h) - h <= F_b(x) <= F_a(x+h) + h on the grid
// (linear interpolation, constant extension), located by bisection.
double levy_distance(const ScalarDensity& a, const ScalarDensity& b);

}  // namespace freeclt
