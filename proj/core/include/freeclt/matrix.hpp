// Complex matrices, the matrix upper half-plane, and spectral norms.
//
// Conventions used throughout the library:
//   imag_part(m) = (m - m*) / (2i), always Hermitian;
//   operator_norm = largest singular value (exact SVD, sizes are small);
//   a point b is admissible when lambda_min(imag_part(b)) > strictness_floor.
#pragma once

#include <complex>
#include <Eigen/Dense>

#include "freeclt/errors.hpp"

namespace freeclt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Minimum lambda_min(Im b) accepted by make_point; keeps resolvents bounded.
inline constexpr double kHalfPlaneFloor = 1e-10;

// Hermitian part of the defect m - m*: (m - m*)/(2i).
ComplexMatrix imag_part(const ComplexMatrix& m);

// Hermitian counterpart, (m + m*)/2.
ComplexMatrix real_part(const ComplexMatrix& m);

// Largest singular value.
double operator_norm(const ComplexMatrix& m);

// max |entry|, used for tensor bounds.
double max_abs_entry(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12);

// Smallest/largest eigenvalue of a Hermitian matrix.
double hermitian_min_eig(const ComplexMatrix& m);
double hermitian_max_eig(const ComplexMatrix& m);

// A validated point of the open matrix upper half-plane with cached norms.
//   im_inv_norm = ||(Im b)^-1|| = 1 / lambda_min(Im b)
//   b_norm      = ||b||
struct OperatorPoint {
  ComplexMatrix b;
  ComplexMatrix im_part;   // imag_part(b), Hermitian positive definite
  double im_inv_norm = 0.0;
  double b_norm = 0.0;

  Eigen::Index dim() const { return b.rows(); }
};

// Validates and caches. Throws NotInUpperHalfPlane when lambda_min(Im m) <= floor,
// DimensionMismatch when m is not square or not finite.
OperatorPoint make_point(const ComplexMatrix& m, double strictness_floor = kHalfPlaneFloor);

// Cap on ||(b - S)^-1|| valid for every self-adjoint S: ||(Im b)^-1||.
double resolvent_norm_cap(const OperatorPoint& p);

// Scalar z (Im z > 0) lifted to z * I_n.
OperatorPoint lift_scalar_point(Complex z, Eigen::Index n);

// Throws DimensionMismatch unless m is square with every entry finite.
void require_square_finite(const ComplexMatrix& m, const char* what);

}  // namespace freeclt
