#include "freeclt/covariance.hpp"

#include <cmath>
#include <random>
#include <string>

namespace freeclt {

namespace {

// Deterministic unit-operator-norm trial matrix; fixed stream so that repeated
// runs (and the CSV reports derived from them) are byte-identical.
ComplexMatrix random_unit_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  const double nrm = operator_norm(m);
  if (nrm == 0.0) return ComplexMatrix::Identity(n, n);
  return m / nrm;
}

}  // namespace

CovarianceModel make_model(Eigen::Index N, std::vector<ComplexMatrix> coefficients,
                           ComplexMatrix sigma, std::optional<std::vector<Complex>> fourth_moments) {
  if (N < 1) throw DimensionMismatch("make_model: N must be >= 1");
  const auto d = static_cast<Eigen::Index>(coefficients.size());
  if (d < 1) throw DimensionMismatch("make_model: need at least one coefficient");
  for (Eigen::Index k = 0; k < d; ++k) {
    const ComplexMatrix& bk = coefficients[static_cast<std::size_t>(k)];
    require_square_finite(bk, "make_model coefficient");
    if (bk.rows() != N)
      throw DimensionMismatch("make_model: coefficient " + std::to_string(k) + " is not N x N");
    if (!is_hermitian(bk, 1e-12))
      throw DimensionMismatch("make_model: coefficient " + std::to_string(k) + " is not Hermitian");
  }
  require_square_finite(sigma, "make_model sigma");
  if (sigma.rows() != d) throw DimensionMismatch("make_model: sigma must be d x d");
  if (!is_hermitian(sigma, 1e-12)) throw DimensionMismatch("make_model: sigma is not Hermitian");
  if (hermitian_min_eig((sigma + sigma.adjoint()) * 0.5) < -1e-12)
    throw DimensionMismatch("make_model: sigma is not positive semidefinite");

  if (fourth_moments) {
    const auto dd = static_cast<std::size_t>(d);
    if (fourth_moments->size() != dd * dd * dd * dd)
      throw DimensionMismatch("make_model: fourth_moments must have d^4 entries");
    for (std::size_t k = 0; k < dd; ++k)
      for (std::size_t l = 0; l < dd; ++l)
        for (std::size_t p = 0; p < dd; ++p)
          for (std::size_t r = 0; r < dd; ++r) {
            const Complex a = (*fourth_moments)[m4_index(dd, k, l, p, r)];
            const Complex b = (*fourth_moments)[m4_index(dd, r, p, l, k)];
            if (std::abs(a - std::conj(b)) > 1e-12)
              throw DimensionMismatch("make_model: fourth_moments breaks adjoint symmetry at (" +
                                      std::to_string(k) + "," + std::to_string(l) + "," +
                                      std::to_string(p) + "," + std::to_string(r) + ")");
          }
  }

  CovarianceModel model;
  model.N = N;
  model.d = d;
  model.coefficients = std::move(coefficients);
  model.sigma = std::move(sigma);
  model.fourth_moments = std::move(fourth_moments);
  return model;
}

ComplexMatrix eta_apply(const CovarianceModel& model, const ComplexMatrix& b) {
  require_square_finite(b, "eta_apply");
  if (b.rows() != model.N) throw DimensionMismatch("eta_apply: argument is not N x N");
  ComplexMatrix out = ComplexMatrix::Zero(model.N, model.N);
  for (Eigen::Index k = 0; k < model.d; ++k) {
    // Accumulate b_k * b * (sum_l sigma_kl b_l); one inner product per k.
    ComplexMatrix inner = ComplexMatrix::Zero(model.N, model.N);
    for (Eigen::Index l = 0; l < model.d; ++l) {
      const Complex s = model.sigma(k, l);
      if (s != 0.0) inner += s * model.coefficients[static_cast<std::size_t>(l)];
    }
    out += model.coefficients[static_cast<std::size_t>(k)] * b * inner;
  }
  return out;
}

double alpha2(const CovarianceModel& model) {
  return operator_norm(eta_apply(model, ComplexMatrix::Identity(model.N, model.N)));
}

ComplexMatrix fourth_moment_word(const CovarianceModel& model, const ComplexMatrix& b) {
  if (!model.has_fourth_moments())
    throw MissingFourthMoments("fourth_moment_word: model has no fourth-moment tensor");
  require_square_finite(b, "fourth_moment_word");
  if (b.rows() != model.N) throw DimensionMismatch("fourth_moment_word: argument is not N x N");
  const ComplexMatrix bstar = b.adjoint();
  const auto d = static_cast<std::size_t>(model.d);
  ComplexMatrix out = ComplexMatrix::Zero(model.N, model.N);
  // Contract left-to-right so each (k,l,p) prefix is shared across r.
  for (std::size_t k = 0; k < d; ++k) {
    const ComplexMatrix left_k = model.coefficients[k] * b;
    for (std::size_t l = 0; l < d; ++l) {
      const ComplexMatrix left_kl = left_k * model.coefficients[l];
      for (std::size_t p = 0; p < d; ++p) {
        const ComplexMatrix left_klp = left_kl * model.coefficients[p] * bstar;
        for (std::size_t r = 0; r < d; ++r) {
          const Complex w = model.m4(k, l, p, r);
          if (w != 0.0) out += w * (left_klp * model.coefficients[r]);
        }
      }
    }
  }
  return out;
}

Alpha4Bounds alpha4_bounds(const CovarianceModel& model, int samples) {
  if (!model.has_fourth_moments())
    throw MissingFourthMoments("alpha4_bounds: model has no fourth-moment tensor");
  Alpha4Bounds out;

  const auto d = static_cast<std::size_t>(model.d);
  std::vector<double> coeff_norms(d);
  for (std::size_t k = 0; k < d; ++k) coeff_norms[k] = operator_norm(model.coefficients[k]);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t r = 0; r < d; ++r)
          out.upper += std::abs(model.m4(k, l, p, r)) * coeff_norms[k] * coeff_norms[l] *
                       coeff_norms[p] * coeff_norms[r];

  // Lower bound: evaluate the word at trial points of the unit ball.
  const double root_n = std::sqrt(static_cast<double>(model.N));
  out.lower = operator_norm(
      fourth_moment_word(model, ComplexMatrix::Identity(model.N, model.N) / root_n));
  std::mt19937_64 rng(0x414c50484134ull);  // fixed seed: reports must be reproducible
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix trial = random_unit_matrix(model.N, rng);
    out.lower = std::max(out.lower, operator_norm(fourth_moment_word(model, trial)));
  }
  return out;
}

BetaConstants beta_constants(const CovarianceModel& model) {
  BetaConstants out;
  out.beta2 = max_abs_entry(model.sigma);
  if (model.has_fourth_moments()) {
    for (const Complex& v : *model.fourth_moments) out.beta4 = std::max(out.beta4, std::abs(v));
  }
  return out;
}

MomentConstants moment_constants(const CovarianceModel& model, int samples) {
  MomentConstants out;
  out.alpha2 = alpha2(model);
  if (model.has_fourth_moments()) {
    const Alpha4Bounds a4 = alpha4_bounds(model, samples);
    out.alpha4_lower = a4.lower;
    out.alpha4_upper = a4.upper;
  }
  const BetaConstants b = beta_constants(model);
  out.beta2 = b.beta2;
  out.beta4 = b.beta4;
  return out;
}

CovarianceModel make_scalar_model(double sigma2, std::optional<double> fourth_moment) {
  std::vector<ComplexMatrix> coeff(1, ComplexMatrix::Identity(1, 1));
  ComplexMatrix sigma(1, 1);
  sigma(0, 0) = sigma2;
  std::optional<std::vector<Complex>> m4;
  if (fourth_moment) m4 = std::vector<Complex>{Complex(*fourth_moment, 0.0)};
  return make_model(1, std::move(coeff), std::move(sigma), std::move(m4));
}

}  // namespace freeclt
