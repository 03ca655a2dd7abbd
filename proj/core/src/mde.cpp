#include "freeclt/mde.hpp"

#include <cmath>

namespace freeclt {

namespace {

constexpr double kThetaFloor = 1.0 / 64.0;

double fp_residual(const ComplexMatrix& b, const ComplexMatrix& etaG, const ComplexMatrix& G) {
  const auto n = b.rows();
  return operator_norm(ComplexMatrix((b - etaG) * G - ComplexMatrix::Identity(n, n)));
}

double fp_residual_right(const ComplexMatrix& b, const ComplexMatrix& etaG,
                         const ComplexMatrix& G) {
  const auto n = b.rows();
  return operator_norm(ComplexMatrix(G * (b - etaG) - ComplexMatrix::Identity(n, n)));
}

}  // namespace

MdeSolution solve_mde(const CovarianceModel& model, const OperatorPoint& point,
                      const MdeOptions& options) {
  if (point.dim() != model.N) throw DimensionMismatch("solve_mde: point dimension != model N");
  const ComplexMatrix& b = point.b;
  const auto n = b.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);

  ComplexMatrix G = options.initial ? *options.initial : ComplexMatrix(b.inverse());
  ComplexMatrix etaG = eta_apply(model, G);
  double res = fp_residual(b, etaG, G);

  MdeSolution out;
  out.near_real_axis = (1.0 / point.im_inv_norm) < 1e-4;
  double theta = 1.0;
  double best_res = res;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    if (res <= options.tol && fp_residual_right(b, etaG, G) <= 10.0 * options.tol) {
      out.G = G;
      out.residual = res;
      out.iterations = iter - 1;
      return out;
    }
    const ComplexMatrix step = (b - etaG).inverse();
    const ComplexMatrix cand = (1.0 - theta) * G + theta * step;
    const ComplexMatrix eta_cand = eta_apply(model, cand);
    const double cand_res = fp_residual(b, eta_cand, cand);
    const bool improved = cand_res < res;
    if (improved || theta <= kThetaFloor) {
      G = cand;
      etaG = eta_cand;
      res = cand_res;
      best_res = std::min(best_res, res);
      out.damping_trace.push_back(theta);
      if (improved) theta = std::min(1.0, theta * 2.0);
    } else {
      theta = std::max(theta * 0.5, kThetaFloor);
    }
  }
  throw NoConvergence("solve_mde: no convergence after " + std::to_string(options.max_iter) +
                          " iterations, best residual " + std::to_string(best_res),
                      options.max_iter, best_res);
}

Complex scalar_semicircle(Complex z, double variance) {
  if (!(variance > 0.0)) throw Error("scalar_semicircle: variance must be positive");
  if (!(z.imag() > 0.0)) throw NotInUpperHalfPlane("scalar_semicircle: Im z must be positive");
  Complex s = std::sqrt(z * z - 4.0 * variance);
  // Align the root with z so z + s never cancels.
  if (z.real() * s.real() + z.imag() * s.imag() < 0.0) s = -s;
  const Complex big = (z + s) / (2.0 * variance);
  const Complex small = 2.0 / (z + s);  // = (z - s)/(2 variance), stable form
  return small.imag() < 0.0 ? small : big;
}

std::vector<MdeGridEntry> solve_mde_grid(const CovarianceModel& model,
                                         const std::vector<OperatorPoint>& points,
                                         const MdeOptions& options) {
  std::vector<MdeGridEntry> out;
  out.reserve(points.size());
  for (const OperatorPoint& p : points) {
    MdeGridEntry entry;
    try {
      entry.solution = solve_mde(model, p, options);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace freeclt
