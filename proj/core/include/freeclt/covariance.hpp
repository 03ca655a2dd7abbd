// Covariance data of a matrix-coefficient family and the induced map
//   eta(b) = sum_{k,l} b_k b b_l sigma_kl,
// together with the scalar constants entering the rate bound:
//   alpha2 = ||eta|| = ||eta(1)||        (eta is completely positive)
//   alpha4 = sup_{||b||=1} ||sum_{k,l,p,r} b_k b b_l b_p b* b_r m4[k][l][p][r]||
//   beta2  = max_{k,l} |sigma_kl|,  beta4 = max |m4|.
#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "freeclt/matrix.hpp"

namespace freeclt {

// Flat row-major tensor index for m4[k][l][p][r], all in [0, d).
inline std::size_t m4_index(std::size_t d, std::size_t k, std::size_t l, std::size_t p,
                            std::size_t r) {
  return ((k * d + l) * d + p) * d + r;
}

struct CovarianceModel {
  Eigen::Index N = 0;  // matrix size of the coefficients
  Eigen::Index d = 0;  // number of coefficient directions
  std::vector<ComplexMatrix> coefficients;  // d Hermitian N x N matrices b_k
  ComplexMatrix sigma;                      // d x d Hermitian PSD covariance
  // Optional flat d^4 tensor of mixed fourth moments, index order [k][l][p][r],
  // satisfying m4[k][l][p][r] = conj(m4[r][p][l][k]).
  std::optional<std::vector<Complex>> fourth_moments;

  bool has_fourth_moments() const { return fourth_moments.has_value(); }
  Complex m4(std::size_t k, std::size_t l, std::size_t p, std::size_t r) const {
    return (*fourth_moments)[m4_index(static_cast<std::size_t>(d), k, l, p, r)];
  }
};

// Validates shapes, Hermitianity of each b_k (within 1e-12), PSD of sigma
// (lambda_min >= -1e-12), and the adjoint symmetry of the fourth-moment tensor.
// Throws DimensionMismatch on any violation.
CovarianceModel make_model(Eigen::Index N, std::vector<ComplexMatrix> coefficients,
                           ComplexMatrix sigma,
                           std::optional<std::vector<Complex>> fourth_moments = std::nullopt);

// eta(b); b must be N x N.
ComplexMatrix eta_apply(const CovarianceModel& model, const ComplexMatrix& b);

// ||eta(1)||; equals the map norm because eta is completely positive.
double alpha2(const CovarianceModel& model);

// sum_{k,l,p,r} b_k b b_l b_p b* b_r m4[k][l][p][r]. Throws MissingFourthMoments.
ComplexMatrix fourth_moment_word(const CovarianceModel& model, const ComplexMatrix& b);

struct Alpha4Bounds {
  double lower = 0.0;  // attained by an explicit trial b, so always <= alpha4
  double upper = 0.0;  // triangle-inequality sum, always >= alpha4
};

// lower: max of ||fourth_moment_word(b)|| over b = I/sqrt(N) and `samples`
// deterministic pseudo-random unit-norm trial matrices.
// upper: sum_klpr |m4| ||b_k|| ||b_l|| ||b_p|| ||b_r||.
Alpha4Bounds alpha4_bounds(const CovarianceModel& model, int samples = 200);

struct BetaConstants {
  double beta2 = 0.0;
  double beta4 = 0.0;  // 0 when the tensor is absent
};

BetaConstants beta_constants(const CovarianceModel& model);

// Bundle used by the sweep driver.
struct MomentConstants {
  double alpha2 = 0.0;
  double alpha4_lower = 0.0;
  double alpha4_upper = 0.0;
  double beta2 = 0.0;
  double beta4 = 0.0;
};

MomentConstants moment_constants(const CovarianceModel& model, int samples = 200);

// Scalar (N = d = 1) model with unit coefficient, variance sigma2 and an
// optional fourth moment; the reduction every scalar family runs through.
CovarianceModel make_scalar_model(double sigma2, std::optional<double> fourth_moment);

}  // namespace freeclt
