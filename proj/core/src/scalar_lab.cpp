#include "freeclt/scalar_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "freeclt/errors.hpp"

namespace freeclt {
namespace {

// Exact moments of the centered two-atom law: sqrt(q/p) with weight p,
// -sqrt(p/q) with weight q. p = 1/2 gives the symmetric +-1 law.
std::vector<Complex> two_atom_moments(double p, int m_max) {
  const double q = 1.0 - p;
  const double a = std::sqrt(q / p);
  const double b = std::sqrt(p / q);
  std::vector<Complex> mom(static_cast<std::size_t>(m_max));
  double pa = 1.0;
  double qb = 1.0;
  for (int k = 1; k <= m_max; ++k) {
    pa *= a;
    qb *= -b;
    mom[static_cast<std::size_t>(k - 1)] = Complex(p * pa + q * qb, 0.0);
  }
  return mom;
}

std::vector<double> cumulant_list_from_moments(double p, int m_max) {
  const std::vector<Complex> kap = cumulants_from_moment_sequence(two_atom_moments(p, m_max));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m_max - 1));
  for (int m = 2; m <= m_max; ++m) out.push_back(kap[static_cast<std::size_t>(m - 1)].real());
  return out;
}

// Norm of the normalized free sum of n two-atom variables, from the support
// of the n-fold free convolution of the 0/1 Bernoulli(p): absolutely
// continuous part on np + (1 - 2p) +- 2 sqrt((n-1) p q), atom at 0 while
// np < 1 and at n while nq < 1; everything recentered by np and divided by
// sqrt(n p q).
double two_atom_norm_bound(double p, int n) {
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  const double scale = std::sqrt(nd * p * q);
  const double edge = 2.0 * std::sqrt((nd - 1.0) * p * q);
  const double skew = 1.0 - 2.0 * p;
  double worst = std::max(std::abs(skew + edge), std::abs(edge - skew));
  if (nd * p < 1.0) worst = std::max(worst, nd * p);
  if (nd * q < 1.0) worst = std::max(worst, nd * q);
  return worst / scale;
}

constexpr double kResidualTol = 1e-13;

// R and dR/dw for the two-atom laws on a tracked branch of
// u = sqrt((1 + gamma w)^2 + 4 w^2); the sign closest to u_prev wins, which
// keeps u continuous along solver paths even across the principal cut.
struct BranchEval {
  Complex r, rp, u_after;
};

BranchEval eval_branch(const ScalarFamily& fam, Complex w, Complex u_prev) {
  BranchEval out;
  if (fam.entire_r) {
    out.r = fam.r_transform(w);
    out.rp = fam.r_derivative(w);
    out.u_after = u_prev;
    return out;
  }
  const Complex A = 1.0 + fam.gamma * w;
  Complex u = std::sqrt(A * A + 4.0 * w * w);
  if (std::abs(u - u_prev) > std::abs(u + u_prev)) u = -u;
  out.u_after = u;
  const Complex den = u + A;
  if (std::abs(den) >= std::abs(w)) {
    out.r = 2.0 * w / den;
    const Complex up = (u == Complex(0.0, 0.0)) ? Complex(0.0, 0.0)
                                                : (fam.gamma * A + 4.0 * w) / u;
    out.rp = 2.0 * (den - w * (up + fam.gamma)) / (den * den);
  } else {
    out.r = (u - A) / (2.0 * w);
    const Complex up = (fam.gamma * A + 4.0 * w) / u;
    out.rp = (up - fam.gamma) / (2.0 * w) - (u - A) / (2.0 * w * w);
  }
  return out;
}

struct PowerState {
  Complex g;
  Complex u;
};

struct FVal {
  Complex f, fp, u_next;
  double abs_f = 0.0;
};

FVal eval_f(const ScalarFamily& fam, double rn, Complex z, const PowerState& st) {
  const BranchEval be = eval_branch(fam, st.g / rn, st.u);
  FVal out;
  out.f = 1.0 / st.g + rn * be.r - z;
  out.fp = -1.0 / (st.g * st.g) + be.rp;
  out.u_next = be.u_after;
  out.abs_f = std::abs(out.f);
  return out;
}

// Damped Newton toward |f| <= tol; leaves st at the best point reached.
bool newton_run(const ScalarFamily& fam, double rn, Complex z, PowerState& st, double tol,
                int max_iter) {
  FVal cur = eval_f(fam, rn, z, st);
  st.u = cur.u_next;
  for (int it = 0; it < max_iter; ++it) {
    if (!std::isfinite(cur.abs_f)) return false;
    if (cur.abs_f <= tol) return true;
    if (cur.fp == Complex(0.0, 0.0)) return false;
    const Complex step = cur.f / cur.fp;
    double lam = 1.0;
    bool moved = false;
    for (int half = 0; half < 30; ++half, lam *= 0.5) {
      PowerState cand{st.g - lam * step, st.u};
      if (cand.g == Complex(0.0, 0.0)) continue;
      const FVal cv = eval_f(fam, rn, z, cand);
      if (std::isfinite(cv.abs_f) && cv.abs_f < cur.abs_f) {
        cand.u = cv.u_next;
        st = cand;
        cur = cv;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return cur.abs_f <= tol;
}

// Im g < 0 and |g| within the resolvent cap 1/Im z.
bool physical_root(const PowerState& st, Complex z) {
  return st.g.imag() < 0.0 && std::abs(st.g) <= (1.0 + 1e-9) / z.imag();
}

}  // namespace

ScalarFamily make_semicircle_family(double variance) {
  if (!(variance > 0.0)) throw Error("make_semicircle_family: variance must be positive");
  ScalarFamily fam;
  fam.name = "semicircle";
  const double v = variance;
  fam.r_transform = [v](Complex w) { return v * w; };
  fam.r_derivative = [v](Complex) { return Complex(v, 0.0); };
  fam.variance = v;
  fam.norm_bound_fn = [v](int) { return 2.0 * std::sqrt(v); };
  fam.cumulant_list.assign(15, 0.0);
  fam.cumulant_list[0] = v;
  fam.symmetric = true;
  fam.entire_r = true;
  return fam;
}

namespace {

// Shared two-atom construction; R(w) = 2w / (u + 1 + gamma w) on the branch
// with u(0) = 1, where gamma = (p - q)/sqrt(pq).
ScalarFamily make_two_atom(double p, std::string name) {
  const double q = 1.0 - p;
  const double gamma = (p - q) / std::sqrt(p * q);
  ScalarFamily fam;
  fam.name = std::move(name);
  fam.r_transform = [gamma](Complex w) {
    const Complex A = 1.0 + gamma * w;
    return 2.0 * w / (std::sqrt(A * A + 4.0 * w * w) + A);
  };
  fam.r_derivative = [gamma](Complex w) {
    const Complex A = 1.0 + gamma * w;
    const Complex u = std::sqrt(A * A + 4.0 * w * w);
    const Complex den = u + A;
    const Complex up = (gamma * A + 4.0 * w) / u;
    return 2.0 * (den - w * (up + gamma)) / (den * den);
  };
  fam.variance = 1.0;
  fam.norm_bound_fn = [p](int n) { return two_atom_norm_bound(p, n); };
  fam.cumulant_list = cumulant_list_from_moments(p, fam.M_max);
  fam.symmetric = (p == 0.5);
  fam.entire_r = false;
  fam.gamma = gamma;
  return fam;
}

}  // namespace

ScalarFamily make_bernoulli_family() { return make_two_atom(0.5, "bernoulli_sym"); }

ScalarFamily make_two_point_family(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw Error("make_two_point_family: p must lie in (0, 1)");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "two_point(p=%g)", p);
  return make_two_atom(p, buf);
}

CumulantFamily to_cumulant_family(const ScalarFamily& fam) {
  CovarianceModel model = make_scalar_model(fam.variance, fam.fourth_moment());
  std::vector<CumulantEntry> entries;
  for (int m = 2; m <= fam.M_max; ++m) {
    const double k = fam.kappa(m);
    if (m > 2 && k == 0.0) continue;
    entries.push_back({Word(static_cast<std::size_t>(m), 0), Complex(k, 0.0)});
  }
  return make_cumulant_family(std::move(model), entries, fam.norm_bound_fn, fam.M_max);
}

Complex free_power_cauchy(const ScalarFamily& fam, int n, Complex z) {
  if (n < 1) throw Error("free_power_cauchy: n must be >= 1");
  if (!(z.imag() > kHalfPlaneFloor)) {
    throw NotInUpperHalfPlane("free_power_cauchy: Im z must exceed the half-plane floor");
  }
  const double rn = std::sqrt(static_cast<double>(n));
  const double y_target = z.imag();
  // Continuation from high up the vertical line through z: the root there is
  // unique and on the u(0) = 1 branch; each descent step warm-starts Newton
  // and carries the tracked branch value along the physical path.
  const double y0 =
      std::max(y_target, (2.0 + std::abs(fam.gamma)) * (std::abs(z) + 2.0));
  PowerState st{1.0 / Complex(z.real(), y0), Complex(1.0, 0.0)};
  if (!newton_run(fam, rn, Complex(z.real(), y0), st, 1e-12, 60)) {
    throw RootNotFound("free_power_cauchy: no root at continuation start", st.g.real(),
                       st.g.imag());
  }
  double y = y0;
  int budget = 4000;
  while (y > y_target) {
    double proposal = std::max(y_target, 0.8 * y);
    for (;;) {
      const Complex zc(z.real(), proposal);
      PowerState trial = st;
      bool ok = newton_run(fam, rn, zc, trial, 1e-10, 40) && physical_root(trial, zc);
      if (!ok && !fam.entire_r) {
        // Branch crossing: the continuity rule can grab the wrong sign right
        // where u passes through zero, so retry with the sign forced over.
        PowerState flip{st.g, -st.u};
        if (newton_run(fam, rn, zc, flip, 1e-10, 40) && physical_root(flip, zc)) {
          trial = flip;
          ok = true;
        }
      }
      if (ok) {
        st = trial;
        y = proposal;
        break;
      }
      const double next = std::sqrt(y * proposal);  // geometric midpoint
      if (--budget <= 0 || next >= y * (1.0 - 1e-12)) {
        throw RootNotFound("free_power_cauchy: continuation stalled", trial.g.real(),
                           trial.g.imag());
      }
      proposal = next;
    }
  }
  newton_run(fam, rn, z, st, 0.0, 80);  // polish to stagnation
  const FVal fin = eval_f(fam, rn, z, st);
  if (!(fin.abs_f <= kResidualTol) || !physical_root(st, z)) {
    throw RootNotFound("free_power_cauchy: no physical root within tolerance", st.g.real(),
                       st.g.imag());
  }
  return st.g;
}

ScalarDensity stieltjes_invert(const ScalarFn& cauchy, const std::vector<double>& grid,
                               double epsilon) {
  if (!(epsilon > 0.0)) throw Error("stieltjes_invert: epsilon must be positive");
  if (grid.size() < 2) throw Error("stieltjes_invert: grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error("stieltjes_invert: grid must be increasing");
  }
  ScalarDensity out;
  out.grid = grid;
  out.epsilon = epsilon;
  out.values.reserve(grid.size());
  for (const double x : grid) {
    double v = -cauchy(Complex(x, epsilon)).imag() / std::numbers::pi;
    if (v < 0.0) {
      out.max_clip = std::max(out.max_clip, -v);
      v = 0.0;
    }
    out.values.push_back(v);
  }
  return out;
}

std::vector<double> make_grid(double lo, double hi, int count) {
  if (count < 2) throw Error("make_grid: need at least two points");
  if (!(hi > lo)) throw Error("make_grid: hi must exceed lo");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = lo + step * i;
  g.back() = hi;
  return g;
}

std::vector<double> cdf_values(const ScalarDensity& density) {
  std::vector<double> cdf(density.grid.size(), 0.0);
  for (std::size_t j = 1; j < density.grid.size(); ++j) {
    const double dx = density.grid[j] - density.grid[j - 1];
    cdf[j] = cdf[j - 1] + 0.5 * (density.values[j] + density.values[j - 1]) * dx;
  }
  return cdf;
}

double density_mass(const ScalarDensity& density) { return cdf_values(density).back(); }

namespace {

void require_same_grid(const ScalarDensity& a, const ScalarDensity& b) {
  if (a.grid.size() != b.grid.size()) throw GridMismatch("density grids differ in size");
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    if (a.grid[i] != b.grid[i]) throw GridMismatch("density grids differ in abscissae");
  }
}

}  // namespace

double kolmogorov_distance(const ScalarDensity& a, const ScalarDensity& b) {
  require_same_grid(a, b);
  const std::vector<double> fa = cdf_values(a);
  const std::vector<double> fb = cdf_values(b);
  double sup = 0.0;
  for (std::size_t j = 0; j < fa.size(); ++j) sup = std::max(sup, std::abs(fa[j] - fb[j]));
  return sup;
}

double levy_distance(const ScalarDensity& a, const ScalarDensity& b) {
  require_same_grid(a, b);
  const std::vector<double> fa = cdf_values(a);
  const std::vector<double> fb = cdf_values(b);
  const std::vector<double>& gx = a.grid;
  const auto interp = [&gx](const std::vector<double>& f, double x) {
    if (x <= gx.front()) return f.front();
    if (x >= gx.back()) return f.back();
    const auto it = std::upper_bound(gx.begin(), gx.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - gx.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - gx[lo]) / (gx[hi] - gx[lo]);
    return f[lo] + t * (f[hi] - f[lo]);
  };
  const auto fits = [&](double h) {
    for (std::size_t j = 0; j < gx.size(); ++j) {
      if (interp(fa, gx[j] - h) - h > fb[j] + 1e-12) return false;
      if (fb[j] > interp(fa, gx[j] + h) + h + 1e-12) return false;
    }
    return true;
  };
  if (fits(0.0)) return 0.0;
  double lo = 0.0;
  double hi = std::max(gx.back() - gx.front(), 2.0);
  while (!fits(hi) && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace freeclt
