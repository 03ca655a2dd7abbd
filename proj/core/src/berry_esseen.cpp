#include "freeclt/berry_esseen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "freeclt/covariance.hpp"
#include "freeclt/errors.hpp"
#include "freeclt/mde.hpp"

namespace freeclt {

double c_n(const BoundInputs& in) {
  const double t = in.im_inv_norm;
  const double nd = static_cast<double>(in.n);
  const double t2 = t * t;
  const double first = (1.0 / std::sqrt(nd)) * t * t2 * std::sqrt(in.alpha2) *
                       (2.0 * in.alpha2 + std::sqrt(in.alpha4 + 2.0 * in.alpha2 * in.alpha2));
  const double second = (1.0 / nd) * t2 * t2 * in.alpha2 * in.alpha2;
  return first + second;
}

double theorem_rhs(const BoundInputs& in) {
  const double t = in.im_inv_norm;
  return 4.0 * c_n(in) * (in.b_norm + in.alpha2 * t) * t * t;
}

std::string format_point_id(Complex z) {
  char buf[64];
  if (z.real() == 0.0) {
    std::snprintf(buf, sizeof(buf), "%gi", z.imag());
  } else {
    std::snprintf(buf, sizeof(buf), "%g%+gi", z.real(), z.imag());
  }
  return buf;
}

namespace {

void sort_records(std::vector<RateRecord>& records) {
  std::sort(records.begin(), records.end(), [](const RateRecord& a, const RateRecord& b) {
    if (a.point_id != b.point_id) return a.point_id < b.point_id;
    return a.n < b.n;
  });
}

}  // namespace

std::vector<RateRecord> run_sweep(const ScalarFamily& fam, const std::vector<Complex>& points,
                                  const std::vector<int>& ns) {
  std::vector<RateRecord> records;
  records.reserve(points.size() * ns.size());
  for (const Complex z : points) {
    for (const int n : ns) {
      const Complex gn = free_power_cauchy(fam, n, z);
      const Complex glim = scalar_semicircle(z, fam.variance);
      BoundInputs in;
      in.alpha2 = fam.variance;
      in.alpha4 = fam.fourth_moment();
      in.im_inv_norm = 1.0 / z.imag();
      in.b_norm = std::abs(z);
      in.n = n;
      RateRecord rec;
      rec.point_id = format_point_id(z);
      rec.n = n;
      rec.method = "scalar_oracle";
      rec.lhs_value = std::abs(gn - glim);
      rec.lhs_tail = 0.0;
      rec.c_n = c_n(in);
      rec.rhs = theorem_rhs(in);
      rec.ratio = rec.lhs_value / rec.rhs;
      rec.alpha2 = in.alpha2;
      rec.alpha4_upper = in.alpha4;
      rec.b_norm = in.b_norm;
      rec.im_inv_norm = in.im_inv_norm;
      records.push_back(std::move(rec));
    }
  }
  sort_records(records);
  return records;
}

std::vector<RateRecord> run_sweep(const CumulantFamily& fam, const std::vector<LabeledPoint>& points,
                                  const std::vector<int>& ns, int truncation_order) {
  const double a2 = alpha2(fam.model);
  const double a4_upper = alpha4_bounds(fam.model).upper;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<RateRecord> records;
  records.reserve(points.size() * ns.size());
  for (const LabeledPoint& lp : points) {
    const MdeSolution limit = solve_mde(fam.model, lp.point);
    for (const int n : ns) {
      BoundInputs in;
      in.alpha2 = a2;
      in.alpha4 = a4_upper;
      in.im_inv_norm = lp.point.im_inv_norm;
      in.b_norm = lp.point.b_norm;
      in.n = n;
      RateRecord rec;
      rec.point_id = lp.id;
      rec.n = n;
      rec.method = "series";
      rec.c_n = c_n(in);
      rec.rhs = theorem_rhs(in);
      rec.alpha2 = a2;
      rec.alpha4_upper = a4_upper;
      rec.b_norm = in.b_norm;
      rec.im_inv_norm = in.im_inv_norm;
      try {
        const SeriesCauchyValue sv = gn_series(fam, n, lp.point, truncation_order);
        rec.lhs_value = operator_norm(sv.value - limit.G);
        rec.lhs_tail = sv.tail_budget + lp.point.im_inv_norm * limit.residual;
        rec.ratio = rec.lhs_value / rec.rhs;
      } catch (const ContractionViolated& e) {
        rec.skipped = true;
        rec.skip_reason = e.what();
        rec.lhs_value = nan;
        rec.lhs_tail = nan;
        rec.ratio = nan;
      }
      records.push_back(std::move(rec));
    }
  }
  sort_records(records);
  return records;
}

RegressionResult rate_regression(const std::vector<RateRecord>& records) {
  std::vector<double> xs, ys;
  for (const RateRecord& r : records) {
    if (r.skipped) continue;
    if (!std::isfinite(r.lhs_value) || !(r.lhs_value > 10.0 * r.lhs_tail)) continue;
    if (!(r.lhs_value > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(r.n)));
    ys.push_back(std::log(r.lhs_value));
  }
  if (xs.size() < 4) {
    throw InsufficientData("rate_regression: fewer than 4 usable records");
  }
  const double m = static_cast<double>(xs.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - xbar;
    const double dy = ys[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InsufficientData("rate_regression: degenerate n values");
  RegressionResult out;
  out.slope = sxy / sxx;
  out.intercept = ybar - out.slope * xbar;
  const double ss_res = syy - out.slope * sxy;
  out.r_squared = (syy > 0.0) ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  out.used = static_cast<int>(xs.size());
  return out;
}

}  // namespace freeclt
