#include "freeclt/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "freeclt/berry_esseen.hpp"
#include "freeclt/covariance.hpp"
#include "freeclt/cumulants.hpp"
#include "freeclt/errors.hpp"
#include "freeclt/matrix.hpp"
#include "freeclt/mde.hpp"
#include "freeclt/scalar_lab.hpp"

namespace freeclt {
namespace {

std::string num(double v) {
  char b[48];
  std::snprintf(b, sizeof(b), "%.6g", v);
  return b;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// Every criterion feeds the norms it computes into here; the final check
// audits norm <= cap globally (cap = ||(Im b)^-1|| plus tail budget or 1e-9).
struct CapCollector {
  double worst_excess = -std::numeric_limits<double>::infinity();
  int count = 0;
  void add(double norm, double cap) {
    ++count;
    worst_excess = std::max(worst_excess, norm - cap);
  }
};

ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n,
                            std::uniform_real_distribution<double>& u) {
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = Complex(u(rng), u(rng));
  return m;
}

// N=2, d=2 projector directions with identity covariance: the fixed point at
// z I_2 must reduce to two uncoupled scalar problems.
CovarianceModel block_projector_model() {
  ComplexMatrix b1 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix b2 = ComplexMatrix::Zero(2, 2);
  b1(0, 0) = 1.0;
  b2(1, 1) = 1.0;
  return make_model(2, {b1, b2}, ComplexMatrix::Identity(2, 2), std::nullopt);
}

// Same projector model driven by two free symmetric +-1 directions: mixed
// cumulants vanish, each direction carries the +-1 cumulant sequence, the
// mixed fourth moments are E[x_k x_l x_p x_r] (0 for the crossing pattern),
// and ||S_n|| <= 2 for every n.
CumulantFamily block_bernoulli_family() {
  ComplexMatrix b1 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix b2 = ComplexMatrix::Zero(2, 2);
  b1(0, 0) = 1.0;
  b2(1, 1) = 1.0;
  std::vector<Complex> m4(16, Complex(0.0, 0.0));
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t l = 0; l < 2; ++l) {
      m4[m4_index(2, k, k, l, l)] = 1.0;
      m4[m4_index(2, k, l, l, k)] = 1.0;
    }
  CovarianceModel model =
      make_model(2, {b1, b2}, ComplexMatrix::Identity(2, 2), std::move(m4));
  const ScalarFamily bern = make_bernoulli_family();
  std::vector<CumulantEntry> entries;
  for (int m = 2; m <= 16; ++m) {
    const double kap = bern.kappa(m);
    if (kap == 0.0) continue;
    for (int k = 0; k < 2; ++k) {
      entries.push_back({Word(static_cast<std::size_t>(m), k), Complex(kap, 0.0)});
    }
  }
  return make_cumulant_family(std::move(model), entries, [](int) { return 2.0; }, 16);
}

CriterionResult crit1(CapCollector& caps) {
  Timer timer;
  CriterionResult r;
  r.id = 1;
  r.name = "scalar fixed point matches closed form";
  const CovarianceModel model = make_scalar_model(1.0, std::nullopt);
  double worst = 0.0;
  for (int ix = 0; ix < 20; ++ix) {
    const double x = -3.0 + 6.0 * static_cast<double>(ix) / 19.0;
    for (int iy = 0; iy < 10; ++iy) {
      const double y = 0.1 * std::pow(100.0, static_cast<double>(iy) / 9.0);
      const Complex z(x, y);
      const OperatorPoint pt = lift_scalar_point(z, 1);
      const MdeSolution sol = solve_mde(model, pt);
      const Complex g = sol.G(0, 0);
      worst = std::max(worst, std::abs(g - scalar_semicircle(z, 1.0)));
      caps.add(std::abs(g), pt.im_inv_norm + 1e-9);
    }
  }
  r.seconds = timer.seconds();
  r.pass = worst <= 1e-10 && r.seconds < 1.0;
  r.detail = "max gap " + num(worst) + " over 200 points (tol 1e-10)";
  return r;
}

CriterionResult crit2(CapCollector& caps) {
  Timer timer;
  CriterionResult r;
  r.id = 2;
  r.name = "projector block model decouples";
  const CovarianceModel model = block_projector_model();
  double worst = 0.0;
  for (const double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    for (const double y : {0.2, 0.5, 1.0, 3.0}) {
      const Complex z(x, y);
      const OperatorPoint pt = lift_scalar_point(z, 2);
      const MdeSolution sol = solve_mde(model, pt);
      const ComplexMatrix want =
          scalar_semicircle(z, 1.0) * ComplexMatrix::Identity(2, 2);
      worst = std::max(worst, (sol.G - want).cwiseAbs().maxCoeff());
      caps.add(operator_norm(sol.G), pt.im_inv_norm + 1e-9);
    }
  }
  r.seconds = timer.seconds();
  r.pass = worst <= 1e-10 && r.seconds < 1.0;
  r.detail = "max entry gap " + num(worst) + " over 20 points (tol 1e-10)";
  return r;
}

CriterionResult crit3(CapCollector&) {
  Timer timer;
  CriterionResult r;
  r.id = 3;
  r.name = "moment recursion matches partition enumeration";
  const long catalan[] = {1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};
  bool counts_ok = true;
  for (int m = 1; m <= 10; ++m) {
    counts_ok = counts_ok &&
                enumerate_nc(m).size() == static_cast<std::size_t>(catalan[m - 1]);
  }
  std::mt19937_64 rng(20260814ull);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index N = 1 + (trial % 2);
    const Eigen::Index d = 1 + ((trial / 2) % 2);
    std::vector<ComplexMatrix> coeffs;
    for (Eigen::Index k = 0; k < d; ++k) {
      ComplexMatrix a = random_matrix(rng, N, u);
      ComplexMatrix h = ((a + a.adjoint()) * 0.5).eval();
      h /= std::max(1.0, operator_norm(h));
      coeffs.push_back(std::move(h));
    }
    const ComplexMatrix bmat = random_matrix(rng, d, u);
    ComplexMatrix sigma = (bmat * bmat.adjoint() / (2.0 * static_cast<double>(d))).eval();
    CovarianceModel model = make_model(N, coeffs, sigma, std::nullopt);

    std::vector<CumulantEntry> entries;
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index l = 0; l < d; ++l) {
        if (sigma(k, l) != 0.0) {
          entries.push_back({Word{static_cast<int>(k), static_cast<int>(l)}, sigma(k, l)});
        }
      }
    for (int order = 3; order <= 8; ++order) {
      std::map<Word, Complex> picked;
      for (int j = 0; j < 2; ++j) {
        Word w(static_cast<std::size_t>(order));
        for (int& idx : w) idx = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
        picked[w] = Complex(0.25 * u(rng), 0.25 * u(rng));
      }
      for (auto& [w, v] : picked) entries.push_back({w, v});
    }
    const CumulantFamily fam = make_cumulant_family(std::move(model), entries, NormBoundFn{}, 8);

    ComplexMatrix c = random_matrix(rng, N, u);
    c /= 2.0 * std::max(1.0, operator_norm(c));
    for (int m = 1; m <= 8; ++m) {
      const ComplexMatrix gap = moment(fam, m, c) - moment_enumerated(fam, m, c);
      worst = std::max(worst, gap.cwiseAbs().maxCoeff());
    }
  }
  r.seconds = timer.seconds();
  r.pass = counts_ok && worst <= 1e-12 && r.seconds < 30.0;
  r.detail = std::string("counts ") + (counts_ok ? "match" : "differ") +
             " through order 10; max route gap " + num(worst) + " (tol 1e-12)";
  return r;
}

CriterionResult crit4(CapCollector& caps) {
  Timer timer;
  CriterionResult r;
  r.id = 4;
  r.name = "series agrees with scalar transform oracle";
  const ScalarFamily fam = make_bernoulli_family();
  const CumulantFamily cfam = to_cumulant_family(fam);
  const Complex zs[] = {Complex(0, 2), Complex(0, 3), Complex(1, 2)};
  const int ns[] = {1, 2, 4, 8, 16};
  bool ok = true;
  double worst_slack = -std::numeric_limits<double>::infinity();
  std::string excluded;
  for (const Complex z : zs) {
    for (const int n : ns) {
      const OperatorPoint pt = lift_scalar_point(z, 1);
      const double rho = cfam.norm_bound(n) / std::abs(z);
      if (rho > 0.9) {
        // The geometric-series precondition excludes this combination; it
        // must be exactly the two largest n at the lowest point, and the
        // guard must actually trip.
        const bool expected = (z == Complex(0, 2)) && (n == 8 || n == 16);
        bool threw = false;
        try {
          gn_series(cfam, n, pt, 16);
        } catch (const ContractionViolated&) {
          threw = true;
        }
        ok = ok && expected && threw;
        excluded += " " + format_point_id(z) + ":n" + std::to_string(n);
        continue;
      }
      const SeriesCauchyValue sv = gn_series(cfam, n, pt, 16);
      const Complex oracle = free_power_cauchy(fam, n, z);
      const double gap = std::abs(sv.value(0, 0) - oracle);
      ok = ok && gap <= sv.tail_budget + 1e-11;
      worst_slack = std::max(worst_slack, gap - sv.tail_budget);
      caps.add(std::abs(sv.value(0, 0)), pt.im_inv_norm + sv.tail_budget);
      caps.add(std::abs(oracle), pt.im_inv_norm + 1e-9);
    }
  }
  const Complex spot1 = free_power_cauchy(fam, 1, Complex(0, 3));
  const Complex spot2 = free_power_cauchy(fam, 2, Complex(0, 3));
  const double e1 = std::abs(spot1 - Complex(0.0, -0.3));
  const double e2 = std::abs(spot2 - Complex(0.0, -1.0 / std::sqrt(11.0)));
  ok = ok && e1 <= 1e-12 && e2 <= 1e-12;
  r.seconds = timer.seconds();
  r.pass = ok && r.seconds < 30.0;
  r.detail = "max (gap - budget) " + num(worst_slack) + "; spot errors " + num(e1) + ", " +
             num(e2) + "; guard-excluded:" + (excluded.empty() ? " none" : excluded);
  return r;
}

CriterionResult crit5(CapCollector& caps) {
  Timer timer;
  CriterionResult r;
  r.id = 5;
  r.name = "certified bound dominates measured gap (scalar path)";
  const std::vector<Complex> points = {Complex(0, 1), Complex(0, 2), Complex(0, 3),
                                       Complex(0, 5), Complex(1, 2)};
  std::vector<int> ns;
  for (int n = 1; n <= 1024; n *= 2) ns.push_back(n);
  bool ok = true;
  double min_margin = std::numeric_limits<double>::infinity();
  int total = 0;
  for (const ScalarFamily& fam : {make_bernoulli_family(), make_two_point_family(0.3)}) {
    const std::vector<RateRecord> records = run_sweep(fam, points, ns);
    for (const RateRecord& rec : records) {
      ok = ok && (rec.lhs_value + 1e-12 <= rec.rhs);
      min_margin = std::min(min_margin, rec.rhs - rec.lhs_value);
      ++total;
    }
    for (const Complex z : points) {
      for (const int n : ns) {
        caps.add(std::abs(free_power_cauchy(fam, n, z)), 1.0 / z.imag() + 1e-9);
      }
    }
  }
  r.seconds = timer.seconds();
  r.pass = ok && r.seconds < 60.0;
  r.detail = "bound holds in " + std::to_string(total) + "/110 records; min margin " +
             num(min_margin);
  return r;
}

CriterionResult crit6(CapCollector& caps) {
  Timer timer;
  CriterionResult r;
  r.id = 6;
  r.name = "certified bound dominates measured gap (series path)";
  const CumulantFamily fam = block_bernoulli_family();
  const OperatorPoint pt = make_point(Complex(0, 3) * ComplexMatrix::Identity(2, 2));
  const std::vector<RateRecord> records =
      run_sweep(fam, {{"3i_I2", pt}}, std::vector<int>{4, 16, 64}, 16);
  bool ok = true;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const RateRecord& rec : records) {
    ok = ok && !rec.skipped && (rec.lhs_value + rec.lhs_tail <= rec.rhs);
    if (!rec.skipped) min_margin = std::min(min_margin, rec.rhs - rec.lhs_value - rec.lhs_tail);
  }
  const MdeSolution limit = solve_mde(fam.model, pt);
  caps.add(operator_norm(limit.G), pt.im_inv_norm + 1e-9);
  for (const int n : {4, 16, 64}) {
    const SeriesCauchyValue sv = gn_series(fam, n, pt, 16);
    caps.add(operator_norm(sv.value), pt.im_inv_norm + sv.tail_budget);
  }
  r.seconds = timer.seconds();
  r.pass = ok && records.size() == 3 && r.seconds < 120.0;
  r.detail = "n in {4,16,64} at 3i I2; min margin " + num(min_margin);
  return r;
}

CriterionResult crit7(CapCollector&) {
  Timer timer;
  CriterionResult r;
  r.id = 7;
  r.name = "gap decay exponent matches skewness prediction";
  std::vector<int> ns;
  for (int n = 4; n <= 256; n *= 2) ns.push_back(n);
  const std::vector<Complex> pts = {Complex(0, 3)};
  const RegressionResult skewed =
      rate_regression(run_sweep(make_two_point_family(0.3), pts, ns));
  const RegressionResult symmetric =
      rate_regression(run_sweep(make_bernoulli_family(), pts, ns));
  r.seconds = timer.seconds();
  r.pass = skewed.slope >= -1.2 && skewed.slope <= -0.45 && skewed.r_squared >= 0.95;
  r.detail = "two-point slope " + num(skewed.slope) + " (gate [-1.2,-0.45]), r^2 " +
             num(skewed.r_squared) + " (gate >= 0.95); +-1 slope " + num(symmetric.slope) +
             " reported ungated";
  return r;
}

CriterionResult crit8(CapCollector& caps) {
  Timer timer;
  CriterionResult r;
  r.id = 8;
  r.name = "density from the fixed point matches the smoothed closed form";
  const std::vector<double> grid = make_grid(-3.0, 3.0, 801);
  const double eps = 0.01;
  const CovarianceModel model = make_scalar_model(1.0, std::nullopt);
  const ScalarDensity solved = stieltjes_invert(
      [&](Complex z) {
        const OperatorPoint pt = lift_scalar_point(z, 1);
        const Complex g = solve_mde(model, pt).G(0, 0);
        caps.add(std::abs(g), pt.im_inv_norm + 1e-9);
        return g;
      },
      grid, eps);
  const ScalarDensity smooth =
      stieltjes_invert([](Complex z) { return scalar_semicircle(z, 1.0); }, grid, eps);
  double sup_smooth = 0.0;
  double sup_plain = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sup_smooth = std::max(sup_smooth, std::abs(solved.values[i] - smooth.values[i]));
    const double plain =
        std::sqrt(std::max(0.0, 4.0 - grid[i] * grid[i])) / (2.0 * std::numbers::pi);
    sup_plain = std::max(sup_plain, std::abs(solved.values[i] - plain));
  }
  const double mass = density_mass(solved);
  r.seconds = timer.seconds();
  r.pass = sup_smooth <= 0.012 && std::abs(mass - 1.0) <= 0.05;
  r.detail = "sup gap vs height-0.01 reference " + num(sup_smooth) +
             " (tol 0.012); mass " + num(mass) + " (within 0.05 of 1); sup gap vs sharp "
             "half-circle " + num(sup_plain) + ", info only: smoothing floor ~0.021 at the edge";
  return r;
}

CriterionResult crit9(CapCollector&) {
  Timer timer;
  CriterionResult r;
  r.id = 9;
  r.name = "bound arithmetic reproduces frozen hand values";
  BoundInputs in;
  in.alpha2 = 1.0;
  in.alpha4 = 1.0;
  in.im_inv_norm = 1.0 / 3.0;
  in.b_norm = 3.0;
  in.n = 4;
  const double c = c_n(in);
  const double rhs = theorem_rhs(in);
  const double e1 = std::abs(c - 0.07219847174510267);
  const double e2 = std::abs(rhs - 0.1069606988816336);
  r.seconds = timer.seconds();
  r.pass = e1 <= 1e-9 && e2 <= 1e-9;
  r.detail = "c_4 off by " + num(e1) + ", rhs off by " + num(e2) + " (tol 1e-9)";
  return r;
}

CriterionResult crit10(const CapCollector& caps) {
  CriterionResult r;
  r.id = 10;
  r.name = "resolvent norms stay under certified caps";
  r.pass = caps.count > 0 && caps.worst_excess <= 0.0;
  r.detail = std::to_string(caps.count) + " observations; worst (norm - cap) " +
             num(caps.worst_excess);
  r.seconds = 0.0;
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::string& suite) {
  std::vector<int> ids;
  if (suite == "mde") {
    ids = {1, 2, 8};
  } else if (suite == "cumulants") {
    ids = {3, 4};
  } else if (suite == "rate") {
    ids = {5, 6, 7, 9};
  } else if (suite == "all") {
    ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  } else {
    throw Error("unknown suite \"" + suite + "\" (want mde, cumulants, rate or all)");
  }
  CapCollector caps;
  std::vector<CriterionResult> results;
  for (const int id : ids) {
    switch (id) {
      case 1: results.push_back(crit1(caps)); break;
      case 2: results.push_back(crit2(caps)); break;
      case 3: results.push_back(crit3(caps)); break;
      case 4: results.push_back(crit4(caps)); break;
      case 5: results.push_back(crit5(caps)); break;
      case 6: results.push_back(crit6(caps)); break;
      case 7: results.push_back(crit7(caps)); break;
      case 8: results.push_back(crit8(caps)); break;
      case 9: results.push_back(crit9(caps)); break;
      case 10: results.push_back(crit10(caps)); break;
      default: break;
    }
  }
  return results;
}

std::string format_results(const std::vector<CriterionResult>& results) {
  std::string out;
  for (const CriterionResult& r : results) {
    char line[512];
    std::snprintf(line, sizeof(line), "[%s] c%d %s: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL",
                  r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
    out += line;
  }
  return out;
}

bool all_pass(const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results) {
    if (!r.pass) return false;
  }
  return !results.empty();
}

}  // namespace freeclt
