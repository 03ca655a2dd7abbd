// Joint free-cumulant data for a matrix-coefficient family X = sum_k b_k (x_k)
// and everything derived from it combinatorially:
//   * non-crossing partition enumeration (small orders),
//   * operator-valued moments E[X c X c ... X] via the first-block recursion,
//   * the same moments via explicit partition sums (reference path),
//   * free-power scaling kappa_m -> n^(1-m/2) kappa_m,
//   * truncated Neumann evaluation of E[(b - S_n)^-1] with a certified tail.
#pragma once

#include <functional>
#include <map>
#include <vector>

#include "freeclt/covariance.hpp"
#include "freeclt/matrix.hpp"

namespace freeclt {

// Hard ceiling for explicit partition enumeration (Catalan(10) = 16796).
inline constexpr int kMaxEnumerationOrder = 10;

// A non-crossing partition of {0, ..., m-1}: blocks sorted by minimum,
// elements ascending; parent[i] is the innermost block enclosing block i
// (-1 for outermost). Blocks never interleave: no a < b < c < d with
// a, c in one block and b, d in another.
struct NCPartition {
  int m = 0;
  std::vector<std::vector<int>> blocks;
  std::vector<int> parent;
};

// All non-crossing partitions of {0..m-1}; |result| = Catalan(m).
// Throws OrderTooLarge for m < 1 or m > kMaxEnumerationOrder.
std::vector<NCPartition> enumerate_nc(int m);

// Index word (k_1, ..., k_m) into the coefficient list, 0-based.
using Word = std::vector<int>;
using CumulantMap = std::map<Word, Complex>;

// Certified upper bound on ||S_n|| as a function of n >= 1.
using NormBoundFn = std::function<double(int)>;

struct CumulantFamily {
  CovarianceModel model;
  int M_max = 16;
  // cumulants[m] holds the order-m scalar joint cumulants, keyed by word;
  // absent words are zero. Index 0 and 1 stay empty (centered family).
  std::vector<CumulantMap> cumulants;
  NormBoundFn norm_bound;
};

struct CumulantEntry {
  Word word;
  Complex value;
};

// Validates: word indices in [0, d), orders in [1, M_max], order-1 entries
// zero, order-2 entries consistent with model.sigma to 1e-12.
CumulantFamily make_cumulant_family(CovarianceModel model, const std::vector<CumulantEntry>& entries,
                                    NormBoundFn norm_bound, int M_max = 16);

// Free power of order n: order-m cumulants scale by n^(1 - m/2). The returned
// family describes S_n = (X_1 + ... + X_n)/sqrt(n); its norm bound is the
// constant n -> L(n) of the input family.
CumulantFamily scaled_cumulants(const CumulantFamily& fam, int n);

// Same model and covariance with every higher cumulant dropped; the limit
// object. Fourth moments are replaced by their pair-partition (Wick) values
// sigma_kl sigma_pr + sigma_kr sigma_lp and the norm bound by 2 sqrt(alpha2).
CumulantFamily semicircular_family(const CovarianceModel& model);

// E[X c X c ... c X] with m factors of X, via the first-block recursion
//   M_m = sum_{k=1}^m sum_{i_1+...+i_k=m-k} kappa_k(c W_{i_1}, ..., c W_{i_k-1}) tail(i_k),
// W_i = M_i c, tail(i) = c M_i (empty tail = identity), M_0 = 1.
// Throws OrderTooLarge for m > M_max.
ComplexMatrix moment(const CumulantFamily& fam, int m, const ComplexMatrix& c);

// Reference path: moment as an explicit sum over enumerate_nc(m) applied to
// every index word. Exponential in m; capped at kMaxEnumerationOrder.
ComplexMatrix moment_enumerated(const CumulantFamily& fam, int m, const ComplexMatrix& c);

struct SeriesCauchyValue {
  ComplexMatrix value;
  double tail_budget = 0.0;       // ||b^-1|| rho^(M+1) / (1 - rho)
  int truncation_order = 0;       // M
  double contraction_ratio = 0.0; // rho = L_n ||b^-1||
};

// Truncated Neumann series for G_n(b) = E[(b - S_n)^-1]:
//   sum_{m=0}^{M} b^-1 E[(S_n b^-1)^m],
// requires rho = norm_bound(n) * ||b^-1|| <= 0.9 (else ContractionViolated).
SeriesCauchyValue gn_series(const CumulantFamily& fam, int n, const OperatorPoint& point,
                            int M = 16);

// || moment(S_n family, m, I/sqrt(N)) - moment(semicircular limit, m, I/sqrt(N)) ||.
double limit_moment_gap(const CumulantFamily& fam, int n, int m);

// Scalar moment-cumulant conversions (single variable, d = 1). Sequences are
// indexed from order 1: in[0] = order 1, in[1] = order 2, ...
std::vector<Complex> moments_from_cumulant_sequence(const std::vector<Complex>& cumulants);
std::vector<Complex> cumulants_from_moment_sequence(const std::vector<Complex>& moments);

// Multivariate conversions through explicit partition sums (orders capped at
// kMaxEnumerationOrder). cumulant_maps is indexed by order as in CumulantFamily.
Complex nc_moment_from_cumulants(const std::vector<CumulantMap>& cumulant_maps, const Word& w);
std::vector<CumulantMap> nc_cumulants_from_moments(
    const std::function<Complex(const Word&)>& moment_fn, int d, int max_order);

}  // namespace freeclt
