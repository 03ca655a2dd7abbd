#include "freeclt/matrix.hpp"

#include <cmath>
#include <string>

namespace freeclt {

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw DimensionMismatch(std::string(what) + ": matrix must be square and nonempty, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw DimensionMismatch(std::string(what) + ": matrix has non-finite entries");
  }
}

ComplexMatrix imag_part(const ComplexMatrix& m) {
  require_square_finite(m, "imag_part");
  const Complex two_i(0.0, 2.0);
  ComplexMatrix out = (m - m.adjoint()) / two_i;
  // Symmetrize away the last round-off so callers can rely on exact Hermitianity.
  out = ((out + out.adjoint()) * 0.5).eval();
  return out;
}

ComplexMatrix real_part(const ComplexMatrix& m) {
  require_square_finite(m, "real_part");
  return ((m + m.adjoint()) * 0.5).eval();
}

double operator_norm(const ComplexMatrix& m) {
  require_square_finite(m, "operator_norm");
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double max_abs_entry(const ComplexMatrix& m) {
  return m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return operator_norm(ComplexMatrix(m - m.adjoint())) <= tol;
}

double hermitian_min_eig(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double hermitian_max_eig(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

OperatorPoint make_point(const ComplexMatrix& m, double strictness_floor) {
  require_square_finite(m, "make_point");
  OperatorPoint p;
  p.b = m;
  p.im_part = imag_part(m);
  const double lam_min = hermitian_min_eig(p.im_part);
  if (!(lam_min > strictness_floor)) {
    throw NotInUpperHalfPlane("make_point: lambda_min(Im b) = " + std::to_string(lam_min) +
                              " is not above the floor " + std::to_string(strictness_floor));
  }
  // Im b is Hermitian positive definite, so ||(Im b)^-1|| = 1/lambda_min.
  p.im_inv_norm = 1.0 / lam_min;
  p.b_norm = operator_norm(m);
  return p;
}

double resolvent_norm_cap(const OperatorPoint& p) {
  return p.im_inv_norm;
}

OperatorPoint lift_scalar_point(Complex z, Eigen::Index n) {
  if (n < 1) throw DimensionMismatch("lift_scalar_point: dimension must be >= 1");
  ComplexMatrix m = ComplexMatrix::Identity(n, n) * z;
  return make_point(m);
}

}  // namespace freeclt
