#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"

#include <freeclt/cumulants.hpp>
#include <freeclt/errors.hpp>
#include <freeclt/mde.hpp>
#include <freeclt/scalar_lab.hpp>

using namespace freeclt;
using freeclt::test::block_bernoulli_family;
using freeclt::test::gap;
using freeclt::test::mat;

namespace {
const Complex I(0.0, 1.0);

// All set partitions of {0..m-1} as block-index arrays (restricted growth
// strings), filtered down to the non-crossing ones by the direct
// a < b < c < d interleaving test. Independent of enumerate_nc.
std::vector<std::vector<int>> brute_force_nc(int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> rgs(static_cast<std::size_t>(m), 0);
  while (true) {
    bool crossing = false;
    for (int a = 0; a < m && !crossing; ++a)
      for (int b = a + 1; b < m && !crossing; ++b)
        for (int c = b + 1; c < m && !crossing; ++c)
          for (int d = c + 1; d < m && !crossing; ++d)
            crossing = rgs[a] == rgs[c] && rgs[b] == rgs[d] && rgs[a] != rgs[b];
    if (!crossing) out.push_back(rgs);
    // next restricted growth string
    int i = m - 1;
    for (; i > 0; --i) {
      const int cap = 1 + *std::max_element(rgs.begin(), rgs.begin() + i);
      if (rgs[static_cast<std::size_t>(i)] < cap) break;
    }
    if (i == 0) break;
    ++rgs[static_cast<std::size_t>(i)];
    std::fill(rgs.begin() + i + 1, rgs.end(), 0);
  }
  return out;
}

std::string canonical(const std::vector<std::vector<int>>& blocks) {
  std::ostringstream os;
  for (const auto& blk : blocks) {
    for (const int e : blk) os << e << ',';
    os << '|';
  }
  return os.str();
}

std::string canonical_rgs(const std::vector<int>& rgs) {
  const int top = *std::max_element(rgs.begin(), rgs.end());
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(top + 1));
  for (std::size_t i = 0; i < rgs.size(); ++i)
    blocks[static_cast<std::size_t>(rgs[i])].push_back(static_cast<int>(i));
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return canonical(blocks);
}
}  // namespace

TEST_CASE("enumerate_nc counts are the Catalan numbers") {
  const long expected[] = {1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};
  for (int m = 1; m <= 10; ++m) {
    CHECK(enumerate_nc(m).size() == static_cast<std::size_t>(expected[m - 1]));
  }
  CHECK_THROWS_AS(enumerate_nc(0), OrderTooLarge);
  CHECK_THROWS_AS(enumerate_nc(11), OrderTooLarge);
}

TEST_CASE("enumerate_nc agrees with the brute-force partition filter") {
  for (int m = 1; m <= 8; ++m) {
    std::set<std::string> brute;
    for (const auto& rgs : brute_force_nc(m)) brute.insert(canonical_rgs(rgs));
    std::set<std::string> fast;
    for (const NCPartition& p : enumerate_nc(m)) fast.insert(canonical(p.blocks));
    CHECK(brute == fast);
  }
}

TEST_CASE("enumerate_nc parents point at the innermost enclosing block") {
  for (const NCPartition& p : enumerate_nc(6)) {
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
      int want = -1;
      int best_min = -1;
      for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        if (j == i) continue;
        if (p.blocks[j].front() < p.blocks[i].front() &&
            p.blocks[j].back() > p.blocks[i].back() && p.blocks[j].front() > best_min) {
          best_min = p.blocks[j].front();
          want = static_cast<int>(j);
        }
      }
      CHECK(p.parent[i] == want);
    }
  }
}

TEST_CASE("make_cumulant_family validation") {
  CovarianceModel m = make_scalar_model(1.0, 1.0);
  const auto bound = [](int) { return 1.0; };
  std::vector<CumulantEntry> ok = {{Word{0, 0}, 1.0}};
  CHECK_NOTHROW(make_cumulant_family(m, ok, bound));
  // order-2 entry must match sigma
  CHECK_THROWS_AS(make_cumulant_family(m, {{Word{0, 0}, 2.0}}, bound), Error);
  // omitting the order-2 entry means zero, which also contradicts sigma = 1
  CHECK_THROWS_AS(make_cumulant_family(m, {}, bound), Error);
  // centered families only
  CHECK_THROWS_AS(make_cumulant_family(m, {{Word{0, 0}, 1.0}, {Word{0}, 0.5}}, bound), Error);
  // word index outside [0, d)
  CHECK_THROWS_AS(make_cumulant_family(m, {{Word{0, 0}, 1.0}, {Word{1, 1, 1}, 0.5}}, bound),
                  Error);
  // duplicate word
  CHECK_THROWS_AS(
      make_cumulant_family(m, {{Word{0, 0}, 1.0}, {Word{0, 0, 0}, 0.5}, {Word{0, 0, 0}, 0.5}},
                           bound),
      Error);
  // order above M_max
  CHECK_THROWS_AS(make_cumulant_family(m, {{Word{0, 0}, 1.0}, {Word(9, 0), 0.5}}, bound, 8),
                  Error);
}

TEST_CASE("scaled_cumulants applies n^(1 - m/2)") {
  const CumulantFamily bern = to_cumulant_family(make_bernoulli_family());
  const CumulantFamily same = scaled_cumulants(bern, 1);
  for (int m = 2; m <= bern.M_max; ++m) {
    for (const auto& [word, value] : bern.cumulants[static_cast<std::size_t>(m)]) {
      CHECK(std::abs(same.cumulants[static_cast<std::size_t>(m)].at(word) - value) == 0.0);
    }
  }

  const CumulantFamily quarter = scaled_cumulants(bern, 4);
  const Word w4(4, 0);
  CHECK(std::abs(quarter.cumulants[4].at(w4) - Complex(-0.25, 0.0)) <= 1e-15);
  const Word w2(2, 0);
  CHECK(std::abs(quarter.cumulants[2].at(w2) - Complex(1.0, 0.0)) <= 1e-15);  // order 2 fixed
  CHECK_THROWS_AS(scaled_cumulants(bern, 0), Error);
}

TEST_CASE("semicircular_family keeps sigma, drops higher cumulants, Wick m4") {
  const CumulantFamily limit = semicircular_family(make_scalar_model(1.0, std::nullopt));
  CHECK(limit.model.has_fourth_moments());
  CHECK(std::abs(limit.model.m4(0, 0, 0, 0) - Complex(2.0, 0.0)) <= 1e-15);
  for (int m = 3; m <= limit.M_max; ++m) {
    for (const auto& [word, value] : limit.cumulants[static_cast<std::size_t>(m)]) {
      CHECK(std::abs(value) == 0.0);
    }
  }
  CHECK(limit.norm_bound(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(limit.norm_bound(64) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("moment recursion on scalar families") {
  const ComplexMatrix one = mat({{1.0}});
  const CumulantFamily bern = to_cumulant_family(make_bernoulli_family());
  CHECK(gap(moment(bern, 1, one), mat({{0.0}})) == 0.0);
  // atoms at +-1: every even moment is 1, every odd moment 0
  for (const int m : {2, 4, 6, 8}) CHECK(gap(moment(bern, m, one), one) <= 1e-13);
  for (const int m : {3, 5, 7}) CHECK(gap(moment(bern, m, one), mat({{0.0}})) <= 1e-13);

  const CumulantFamily semi = semicircular_family(make_scalar_model(1.0, std::nullopt));
  const double catalan[] = {1.0, 2.0, 5.0, 14.0};
  for (int k = 0; k < 4; ++k) {
    CHECK(gap(moment(semi, 2 * k + 2, one), catalan[k] * one) <= 1e-12);
  }
  CHECK_THROWS_AS(moment(bern, 17, one), OrderTooLarge);
  CHECK_THROWS_AS(moment(bern, 2, ComplexMatrix::Identity(2, 2)), DimensionMismatch);
}

TEST_CASE("recursion and explicit partition sum agree on the block family") {
  const CumulantFamily fam = block_bernoulli_family();
  const ComplexMatrix c = mat({{0.5, Complex(0.2, 0.1)}, {Complex(0.2, -0.1), 0.7}});
  for (int m = 1; m <= 8; ++m) {
    CHECK(gap(moment(fam, m, c), moment_enumerated(fam, m, c)) <= 1e-12);
  }
}

TEST_CASE("gn_series certifies its truncation error") {
  const CumulantFamily bern = to_cumulant_family(make_bernoulli_family());
  const OperatorPoint b3 = lift_scalar_point(3.0 * I, 1);

  const SeriesCauchyValue sv = gn_series(bern, 1, b3, 16);
  CHECK(sv.truncation_order == 16);
  CHECK(sv.contraction_ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // tail = ||b^-1|| rho^(M+1) / (1 - rho)
  const double tail = (1.0 / 3.0) * std::pow(1.0 / 3.0, 17.0) / (1.0 - 1.0 / 3.0);
  CHECK(sv.tail_budget == doctest::Approx(tail).epsilon(1e-12));
  // exact law has atoms at +-1: G(3i) = -0.3i
  CHECK(std::abs(sv.value(0, 0) - Complex(0.0, -0.3)) <= sv.tail_budget);
  // 17-digit regression pin of the certified budget
  CHECK(sv.tail_budget == doctest::Approx(3.8717621875697917e-09).epsilon(1e-12));

  // n = 2 turns the law into the arcsine pair: G(3i) = -i / sqrt(11)
  const SeriesCauchyValue sv2 = gn_series(bern, 2, b3, 16);
  CHECK(std::abs(sv2.value(0, 0) - Complex(0.0, -1.0 / std::sqrt(11.0))) <=
        sv2.tail_budget + 1e-15);

  // resolvent cap holds up to the certified tail
  CHECK(operator_norm(sv.value) <= b3.im_inv_norm + sv.tail_budget);
}

TEST_CASE("gn_series of the semicircular family is the limit itself") {
  const CumulantFamily limit = semicircular_family(make_scalar_model(1.0, std::nullopt));
  const OperatorPoint b3 = lift_scalar_point(3.0 * I, 1);
  const Complex g = scalar_semicircle(3.0 * I, 1.0);
  Complex first;
  for (const int n : {1, 4, 64}) {
    const SeriesCauchyValue sv = gn_series(limit, n, b3, 16);
    CHECK(std::abs(sv.value(0, 0) - g) <= sv.tail_budget + 1e-13);
    if (n == 1) first = sv.value(0, 0);
    CHECK(std::abs(sv.value(0, 0) - first) <= 1e-12);  // n-independence
  }
}

TEST_CASE("gn_series refuses a non-contracting series") {
  const CumulantFamily bern = to_cumulant_family(make_bernoulli_family());
  try {
    gn_series(bern, 1, lift_scalar_point(I, 1), 16);  // rho = 1
    FAIL("expected ContractionViolated");
  } catch (const ContractionViolated& e) {
    CHECK(e.ratio == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gn_series(bern, 0, lift_scalar_point(3.0 * I, 1), 16), Error);
  CHECK_THROWS_AS(gn_series(bern, 1, lift_scalar_point(3.0 * I, 1), 17), OrderTooLarge);
  CHECK_THROWS_AS(gn_series(bern, 1, lift_scalar_point(3.0 * I, 2), 16), DimensionMismatch);
}

TEST_CASE("limit_moment_gap shrinks at the free-power rate") {
  const CumulantFamily bern = to_cumulant_family(make_bernoulli_family());
  for (const int n : {1, 4, 16}) {
    CHECK(limit_moment_gap(bern, n, 2) <= 1e-14);  // order 2 matches by construction
  }
  // order 4 gap is exactly |kappa_4| / n = 1/n
  for (const int n : {1, 2, 4, 8}) {
    CHECK(limit_moment_gap(bern, n, 4) == doctest::Approx(1.0 / n).epsilon(1e-12));
  }
  // order 6: six non-crossing ways to pair two points beside a 4-block plus
  // the full block, so the gap is |6 kappa_4 / n + kappa_6 / n^2| = 6/n - 2/n^2
  double prev = 1e300;
  for (const int n : {1, 4, 64}) {
    const double g = limit_moment_gap(bern, n, 6);
    CHECK(g == doctest::Approx(6.0 / n - 2.0 / (double(n) * n)).epsilon(1e-12));
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("scalar moment-cumulant conversions are mutually inverse") {
  // semicircle: kappa = (0, 1, 0, ...) gives the aerated Catalan moments
  const std::vector<Complex> semi_kappa = {0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const std::vector<Complex> semi_moments = moments_from_cumulant_sequence(semi_kappa);
  const double want_semi[] = {0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0};
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(semi_moments[i] - want_semi[i]) <= 1e-12);

  // symmetric Bernoulli: signed Catalan cumulants give all even moments = 1
  const std::vector<Complex> bern_kappa = {0.0, 1.0, 0.0, -1.0, 0.0, 2.0, 0.0, -5.0};
  const std::vector<Complex> bern_moments = moments_from_cumulant_sequence(bern_kappa);
  const double want_bern[] = {0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0};
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(bern_moments[i] - want_bern[i]) <= 1e-12);

  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Complex> kappa(8);
    for (auto& k : kappa) k = Complex(uni(rng), uni(rng));
    const std::vector<Complex> back =
        cumulants_from_moment_sequence(moments_from_cumulant_sequence(kappa));
    REQUIRE(back.size() == kappa.size());
    for (std::size_t i = 0; i < kappa.size(); ++i) CHECK(std::abs(back[i] - kappa[i]) <= 1e-11);
  }
}

TEST_CASE("multivariate conversions round-trip sparse random data") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const int d = 2;
  const int max_order = 5;
  std::vector<CumulantMap> maps(static_cast<std::size_t>(max_order) + 1);
  for (int order = 1; order <= max_order; ++order) {
    for (int pick = 0; pick < 3; ++pick) {
      Word w(static_cast<std::size_t>(order));
      for (auto& idx : w) idx = static_cast<int>(rng() % 2u);
      maps[static_cast<std::size_t>(order)][w] = Complex(uni(rng), uni(rng));
    }
  }
  const auto moment_fn = [&](const Word& w) { return nc_moment_from_cumulants(maps, w); };
  const std::vector<CumulantMap> back = nc_cumulants_from_moments(moment_fn, d, max_order);
  for (int order = 1; order <= max_order; ++order) {
    // walk every word of this order
    for (int code = 0; code < (1 << order); ++code) {
      Word w(static_cast<std::size_t>(order));
      for (int i = 0; i < order; ++i) w[static_cast<std::size_t>(i)] = (code >> i) & 1;
      const auto& orig_map = maps[static_cast<std::size_t>(order)];
      const auto& back_map = back[static_cast<std::size_t>(order)];
      const Complex orig = orig_map.count(w) ? orig_map.at(w) : 0.0;
      const Complex rec = back_map.count(w) ? back_map.at(w) : 0.0;
      CHECK(std::abs(orig - rec) <= 1e-11);
    }
  }
}
