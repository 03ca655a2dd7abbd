// Quantitative CLT rate machinery: the certified bound
//   ||G_n(b) - G(b)|| <= 4 c_n (||b|| + alpha2 t) t^2,   t = ||(Im b)^-1||,
//   c_n = n^{-1/2} t^3 sqrt(alpha2) (2 alpha2 + sqrt(alpha4 + 2 alpha2^2))
//       + n^{-1} t^4 alpha2^2,
// sweep drivers measuring the left side two independent ways (closed-form
// scalar oracle, truncated resolvent series), and the log-log rate fit.
#pragma once

#include <string>
#include <vector>

#include "freeclt/cumulants.hpp"
#include "freeclt/matrix.hpp"
#include "freeclt/scalar_lab.hpp"

namespace freeclt {

struct BoundInputs {
  double alpha2 = 0.0;
  double alpha4 = 0.0;       // any upper bound on alpha4 keeps the bound valid
  double im_inv_norm = 0.0;  // t
  double b_norm = 0.0;
  int n = 1;
};

double c_n(const BoundInputs& in);
double theorem_rhs(const BoundInputs& in);

struct RateRecord {
  std::string point_id;
  int n = 1;
  std::string method;      // "scalar_oracle" or "series"
  double lhs_value = 0.0;  // measured ||G_n(b) - G(b)||
  double lhs_tail = 0.0;   // certified numerical error inside lhs_value
  double c_n = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;      // lhs_value / rhs
  double alpha2 = 0.0;
  double alpha4_upper = 0.0;
  double b_norm = 0.0;
  double im_inv_norm = 0.0;
  bool skipped = false;  // series contraction failed at this (point, n)
  std::string skip_reason;
};

// "2i", "1+2i", "-1+0.5i": deterministic label for scalar sweep points.
std::string format_point_id(Complex z);

// Scalar path: lhs from the closed-form pair free_power_cauchy vs
// scalar_semicircle (lhs_tail = 0); alpha4 is the family's exact fourth
// moment. Records come back sorted by (point_id, n).
std::vector<RateRecord> run_sweep(const ScalarFamily& fam, const std::vector<Complex>& points,
                                  const std::vector<int>& ns);

struct LabeledPoint {
  std::string id;
  OperatorPoint point;
};

// Operator path: lhs = || series G_n - fixed-point G || with lhs_tail the
// series truncation budget plus the fixed-point residual amplification;
// alpha4_upper is the triangle-inequality tensor bound. A (point, n) where
// the series contraction fails yields a skipped record with NaN lhs fields.
std::vector<RateRecord> run_sweep(const CumulantFamily& fam, const std::vector<LabeledPoint>& points,
                                  const std::vector<int>& ns, int truncation_order = 16);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int used = 0;
};

// Least squares of log lhs_value on log n over usable records (not skipped,
// lhs_value > 10 lhs_tail). Throws InsufficientData with fewer than 4.
RegressionResult rate_regression(const std::vector<RateRecord>& records);

}  // namespace freeclt
