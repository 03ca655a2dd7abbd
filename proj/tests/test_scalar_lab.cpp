#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"

#include <freeclt/errors.hpp>
#include <freeclt/mde.hpp>
#include <freeclt/scalar_lab.hpp>

using namespace freeclt;

namespace {
const Complex I(0.0, 1.0);

// Squared subordination identity for the free powers of the standardized
// two-point law (atom sqrt(q/p) w.p. p, atom -sqrt(p/q) w.p. q). With
// T_n the n-fold additive convolution of the unstandardized {0,1} law,
// g_w = G_{T_n} satisfies n^2 [(g_w+1)^2 - 4 q g_w] = (2 g_w Z - 2 - n g_w + n)^2
// at Z = n p + sqrt(n p q) z, g_w = G_{S_n}(z) / sqrt(n p q). Squaring removes
// the branch choice, so this is a solver-independent consistency oracle.
double binomial_residual(const ScalarFamily& fam, double p, int n, Complex z) {
  const double q = 1.0 - p;
  const Complex g = free_power_cauchy(fam, n, z);
  const double s = std::sqrt(n * p * q);
  const Complex gw = g / s;
  const Complex Z = n * p + s * z;
  const Complex lhs = double(n) * double(n) * ((gw + 1.0) * (gw + 1.0) - 4.0 * q * gw);
  const Complex rhs = 2.0 * gw * Z - 2.0 - double(n) * gw + double(n);
  return std::abs(lhs - rhs * rhs) / std::max(1.0, std::abs(rhs * rhs));
}

ScalarDensity semicircle_density(const std::vector<double>& grid, double epsilon) {
  return stieltjes_invert([](Complex z) { return scalar_semicircle(z, 1.0); }, grid, epsilon);
}
}  // namespace

TEST_CASE("bernoulli family data: signed Catalan cumulants") {
  const ScalarFamily bern = make_bernoulli_family();
  const double want[] = {1, 0, -1, 0, 2, 0, -5, 0, 14, 0, -42, 0, 132, 0, -429};
  REQUIRE(bern.cumulant_list.size() == 15);
  for (int m = 2; m <= 16; ++m) {
    CHECK(bern.kappa(m) == doctest::Approx(want[m - 2]).epsilon(1e-13));
  }
  CHECK(bern.symmetric);
  CHECK(bern.variance == 1.0);
  CHECK(bern.fourth_moment() == doctest::Approx(1.0).epsilon(1e-14));
  // certified norm bounds: L_1 = 1, L_n = 2 sqrt((n-1)/n) for n >= 2
  CHECK(bern.norm_bound_fn(1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(bern.norm_bound_fn(4) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
  CHECK(bern.norm_bound_fn(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("two-point family data: skewness enters through gamma") {
  const ScalarFamily tp = make_two_point_family(0.3);
  const double gamma = (0.3 - 0.7) / std::sqrt(0.3 * 0.7);
  CHECK(tp.gamma == doctest::Approx(gamma).epsilon(1e-14));
  CHECK(tp.kappa(2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tp.kappa(3) == doctest::Approx(-gamma).epsilon(1e-13));
  CHECK(tp.kappa(3) == doctest::Approx(0.87287156094396967).epsilon(1e-13));
  CHECK(tp.kappa(4) == doctest::Approx(gamma * gamma - 1.0).epsilon(1e-12));
  CHECK(tp.fourth_moment() == doctest::Approx(1.7619047619047621).epsilon(1e-12));
  CHECK(tp.third_moment() == tp.kappa(3));
  CHECK(!tp.symmetric);

  // p = 1/2 degenerates to the symmetric Bernoulli
  const ScalarFamily half = make_two_point_family(0.5);
  const ScalarFamily bern = make_bernoulli_family();
  for (int m = 2; m <= 16; ++m) {
    CHECK(std::abs(half.kappa(m) - bern.kappa(m)) <= 1e-12);
  }

  CHECK_THROWS_AS(make_two_point_family(0.0), Error);
  CHECK_THROWS_AS(make_two_point_family(1.0), Error);
  CHECK_THROWS_AS(make_two_point_family(-0.2), Error);
}

TEST_CASE("semicircle family data") {
  const ScalarFamily semi = make_semicircle_family(2.0);
  CHECK(semi.variance == 2.0);
  CHECK(semi.kappa(2) == 2.0);
  for (int m = 3; m <= 16; ++m) CHECK(semi.kappa(m) == 0.0);
  CHECK(semi.entire_r);
  CHECK(semi.norm_bound_fn(1) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(semi.norm_bound_fn(64) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(make_semicircle_family(0.0), Error);
}

TEST_CASE("r_transform matches its own cumulant expansion") {
  const Complex probes[] = {Complex(0.05, 0.0), Complex(0.0, 0.05), Complex(0.03, 0.04)};
  for (const ScalarFamily& fam :
       {make_bernoulli_family(), make_two_point_family(0.3), make_semicircle_family(1.0)}) {
    for (const Complex w : probes) {
      Complex series = 0.0;
      Complex pw = w;
      for (int m = 2; m <= 16; ++m) {
        series += fam.kappa(m) * pw;
        pw *= w;
      }
      CHECK(std::abs(fam.r_transform(w) - series) <= 1e-12);
      // derivative against a central difference
      const double h = 1e-6;
      const Complex fd = (fam.r_transform(w + h) - fam.r_transform(w - h)) / (2.0 * h);
      CHECK(std::abs(fam.r_derivative(w) - fd) <= 1e-5);
    }
  }
}

TEST_CASE("free_power_cauchy: semicircle is a fixed point of free powers") {
  const ScalarFamily semi = make_semicircle_family(1.0);
  for (const int n : {1, 3, 10}) {
    for (const Complex z : {2.0 * I, Complex(1.0, 2.0), Complex(-0.5, 0.4)}) {
      CHECK(std::abs(free_power_cauchy(semi, n, z) - scalar_semicircle(z, 1.0)) <= 1e-12);
    }
  }
}

TEST_CASE("free_power_cauchy: two-atom laws at n = 1 match the rational form") {
  const ScalarFamily bern = make_bernoulli_family();
  CHECK(std::abs(free_power_cauchy(bern, 1, 3.0 * I) - Complex(0.0, -0.3)) <= 1e-12);
  // G(z) = z / (z^2 - 1), including points deep below the branch-cut scale
  for (const Complex z : {Complex(0.0, 0.05), Complex(0.0, 0.5), Complex(0.3, 0.02),
                          Complex(-1.5, 0.01), Complex(1.0, 1e-3)}) {
    const Complex exact = z / (z * z - 1.0);
    CHECK(std::abs(free_power_cauchy(bern, 1, z) - exact) <= 1e-10 * std::abs(exact));
  }

  const ScalarFamily tp = make_two_point_family(0.3);
  const double gamma = tp.gamma;
  for (const Complex z : {I, 2.0 * I, Complex(1.0, 2.0), Complex(0.2, 0.05)}) {
    const Complex exact = (z + gamma) / (z * z + gamma * z - 1.0);
    CHECK(std::abs(free_power_cauchy(tp, 1, z) - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("free_power_cauchy: n = 2 Bernoulli is the arcsine law") {
  const ScalarFamily bern = make_bernoulli_family();
  CHECK(std::abs(free_power_cauchy(bern, 2, 3.0 * I) - Complex(0.0, -1.0 / std::sqrt(11.0))) <=
        1e-13);
  // G(z) = 1 / sqrt(z^2 - 2) with the Im G < 0 branch
  for (const Complex z : {Complex(0.0, 0.05), Complex(1.2, 0.01), Complex(0.3, 0.02)}) {
    Complex want = 1.0 / std::sqrt(z * z - 2.0);
    if (want.imag() > 0.0) want = -want;
    CHECK(std::abs(free_power_cauchy(bern, 2, z) - want) <= 1e-12);
  }
}

TEST_CASE("free_power_cauchy satisfies the squared binomial identity") {
  for (const double p : {0.5, 0.3}) {
    const ScalarFamily fam = p == 0.5 ? make_bernoulli_family() : make_two_point_family(p);
    for (const int n : {1, 2, 3, 4, 8}) {
      for (const Complex z :
           {2.0 * I, Complex(1.0, 2.0), Complex(0.5, 0.3), Complex(-0.7, 0.1)}) {
        CHECK(binomial_residual(fam, p, n, z) <= 1e-12);
      }
    }
  }
}

TEST_CASE("free_power_cauchy solutions are Stieltjes transforms") {
  // Im G < 0 and |G| <= 1 / Im z at every solved point
  for (const ScalarFamily& fam : {make_bernoulli_family(), make_two_point_family(0.3)}) {
    for (const int n : {1, 2, 5}) {
      for (const Complex z : {Complex(0.0, 0.3), Complex(0.8, 0.1), Complex(-1.1, 0.25)}) {
        const Complex g = free_power_cauchy(fam, n, z);
        CHECK(g.imag() < 0.0);
        CHECK(std::abs(g) <= 1.0 / z.imag() + 1e-9);
      }
    }
  }
}

TEST_CASE("free_power_cauchy input validation") {
  const ScalarFamily bern = make_bernoulli_family();
  CHECK_THROWS_AS(free_power_cauchy(bern, 0, 2.0 * I), Error);
  CHECK_THROWS_AS(free_power_cauchy(bern, 1, Complex(1.0, 0.0)), NotInUpperHalfPlane);
  CHECK_THROWS_AS(free_power_cauchy(bern, 1, Complex(1.0, -2.0)), NotInUpperHalfPlane);
}

TEST_CASE("to_cumulant_family mirrors the scalar data") {
  const CumulantFamily cf = to_cumulant_family(make_bernoulli_family());
  CHECK(cf.model.N == 1);
  CHECK(cf.model.d == 1);
  CHECK(std::abs(cf.model.sigma(0, 0) - Complex(1.0, 0.0)) <= 1e-15);
  CHECK(std::abs(cf.model.m4(0, 0, 0, 0) - Complex(1.0, 0.0)) <= 1e-15);  // kappa4 + 2 kappa2^2
  CHECK(cf.M_max == 16);
  CHECK(std::abs(cf.cumulants[4].at(Word(4, 0)) - Complex(-1.0, 0.0)) <= 1e-15);
  CHECK(cf.cumulants[3].empty());
  CHECK(cf.norm_bound(1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(cf.norm_bound(4) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("stieltjes_invert recovers the semicircle density") {
  const std::vector<double> grid = make_grid(-3.0, 3.0, 601);
  const ScalarDensity rho = semicircle_density(grid, 0.01);
  CHECK(rho.epsilon == 0.01);
  CHECK(rho.max_clip == 0.0);  // Im G < 0 everywhere, nothing to clip

  // rho(0) ~ 1/pi, and far outside the support the mass is only smoothing
  const std::size_t mid = 300;  // x = 0
  CHECK(grid[mid] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(rho.values[mid] - 1.0 / std::numbers::pi) <= 0.01);

  const ScalarDensity fine = stieltjes_invert(
      [](Complex z) { return scalar_semicircle(z, 1.0); }, make_grid(2.5, 3.5, 11), 0.001);
  for (const double v : fine.values) CHECK(v <= 0.002);

  CHECK(density_mass(rho) == doctest::Approx(0.99756824369915864).epsilon(1e-9));
}

TEST_CASE("stieltjes_invert validation and clipping") {
  const auto cauchy = [](Complex z) { return scalar_semicircle(z, 1.0); };
  CHECK_THROWS_AS(stieltjes_invert(cauchy, make_grid(-1.0, 1.0, 5), 0.0), Error);
  CHECK_THROWS_AS(stieltjes_invert(cauchy, make_grid(-1.0, 1.0, 5), -0.1), Error);
  CHECK_THROWS_AS(stieltjes_invert(cauchy, {0.0}, 0.01), Error);
  CHECK_THROWS_AS(stieltjes_invert(cauchy, {1.0, 0.0}, 0.01), Error);

  // a function with positive imaginary part everywhere clips to zero
  const ScalarDensity clipped =
      stieltjes_invert([](Complex) { return Complex(0.0, 0.5); }, make_grid(-1.0, 1.0, 5), 0.01);
  for (const double v : clipped.values) CHECK(v == 0.0);
  CHECK(clipped.max_clip == doctest::Approx(0.5 / std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("make_grid endpoints and validation") {
  const std::vector<double> g = make_grid(-3.0, 3.0, 601);
  REQUIRE(g.size() == 601);
  CHECK(g.front() == -3.0);
  CHECK(g.back() == 3.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 1), Error);
  CHECK_THROWS_AS(make_grid(1.0, 0.0, 5), Error);
}

TEST_CASE("cdf_values is a nondecreasing ramp to the total mass") {
  const ScalarDensity rho = semicircle_density(make_grid(-3.0, 3.0, 601), 0.01);
  const std::vector<double> cdf = cdf_values(rho);
  REQUIRE(cdf.size() == rho.grid.size());
  CHECK(cdf.front() == 0.0);
  for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i] >= cdf[i - 1]);
  CHECK(cdf.back() == doctest::Approx(density_mass(rho)).epsilon(1e-12));
}

TEST_CASE("kolmogorov_distance: identity, shift sensitivity, separation") {
  const std::vector<double> grid = make_grid(-3.0, 3.0, 601);
  const ScalarDensity rho = semicircle_density(grid, 0.01);
  CHECK(kolmogorov_distance(rho, rho) == 0.0);

  // shifting by h moves the CDF by at most rho_max h = h / pi
  const double h = 0.01;
  const ScalarDensity shifted = stieltjes_invert(
      [&](Complex z) { return scalar_semicircle(z - h, 1.0); }, grid, 0.01);
  CHECK(kolmogorov_distance(rho, shifted) <= h / std::numbers::pi + 1e-4);
  CHECK(kolmogorov_distance(rho, shifted) > 1e-4);

  // disjoint unit-mass blocks are at distance ~1
  ScalarDensity a, b;
  a.grid = b.grid = grid;
  a.epsilon = b.epsilon = 0.01;
  a.values.assign(grid.size(), 0.0);
  b.values.assign(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid[j] >= -2.0 && grid[j] <= -1.0) a.values[j] = 1.0;
    if (grid[j] >= 1.0 && grid[j] <= 2.0) b.values[j] = 1.0;
  }
  const double ks = kolmogorov_distance(a, b);
  CHECK(ks >= 0.99);
  CHECK(ks <= 1.02);

  ScalarDensity other = rho;
  other.grid = make_grid(-3.0, 3.0, 301);
  other.values.resize(301);
  CHECK_THROWS_AS(kolmogorov_distance(rho, other), GridMismatch);
}

TEST_CASE("levy_distance: identity, domination by Kolmogorov, regression value") {
  const std::vector<double> grid = make_grid(-3.0, 3.0, 601);
  const ScalarDensity sc = semicircle_density(grid, 0.01);
  CHECK(levy_distance(sc, sc) == 0.0);

  const ScalarFamily bern = make_bernoulli_family();
  const ScalarDensity arcsine = stieltjes_invert(
      [&](Complex z) { return free_power_cauchy(bern, 2, z); }, grid, 0.01);
  const double levy = levy_distance(sc, arcsine);
  const double ks = kolmogorov_distance(sc, arcsine);
  CHECK(levy > 0.0);
  CHECK(levy <= ks + 1e-12);
  // regression pins: values produced by this implementation's bisection
  CHECK(levy == doctest::Approx(0.062400607548807219).epsilon(1e-9));
  CHECK(ks == doctest::Approx(0.07575304232452143).epsilon(1e-9));
}

TEST_CASE("free powers of the Bernoulli law converge to the semicircle") {
  const std::vector<double> grid = make_grid(-3.0, 3.0, 601);
  const double eps = 0.05;
  const ScalarDensity limit = semicircle_density(grid, eps);
  const ScalarFamily bern = make_bernoulli_family();
  double prev = 2.0;
  double last = 0.0;
  for (int k = 0; k <= 8; ++k) {
    const int n = 1 << k;
    const ScalarDensity dn = stieltjes_invert(
        [&](Complex z) { return free_power_cauchy(bern, n, z); }, grid, eps);
    last = kolmogorov_distance(limit, dn);
    CHECK(last < prev);  // strictly decreasing along n = 2^k
    prev = last;
  }
  CHECK(last <= 3e-4);  // measured 2.80e-4 at n = 256
}
