#include "freeclt/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace freeclt {

namespace {

using Blocks = std::vector<std::vector<int>>;

// All non-crossing partitions of {0..len-1} in canonical form, built by
// choosing the block of 0 and recursing into the enclosed gaps and the tail.
// Cached per length; enumerate_nc shifts as needed.
class CanonicalNc {
 public:
  const std::vector<Blocks>& of_length(int len) {
    while (static_cast<int>(cache_.size()) <= len) build_next();
    return cache_[static_cast<std::size_t>(len)];
  }

 private:
  void build_next() {
    const int len = static_cast<int>(cache_.size());
    std::vector<Blocks> out;
    if (len == 0) {
      out.push_back({});
    } else {
      std::vector<int> first{0};
      std::vector<std::pair<int, int>> gaps;  // enclosed gaps as [lo, hi]
      extend_first_block(len, first, gaps, out);
    }
    cache_.push_back(std::move(out));
  }

  void extend_first_block(int len, std::vector<int>& first, std::vector<std::pair<int, int>>& gaps,
                          std::vector<Blocks>& out) {
    // Close the first block here; everything after its last element is a tail gap.
    {
      std::vector<std::pair<int, int>> all = gaps;
      if (first.back() + 1 <= len - 1) all.emplace_back(first.back() + 1, len - 1);
      combine(all, 0, Blocks{first}, out);
    }
    for (int q = first.back() + 1; q <= len - 1; ++q) {
      gaps.emplace_back(first.back() + 1, q - 1);  // may be empty, filtered in combine
      first.push_back(q);
      extend_first_block(len, first, gaps, out);
      first.pop_back();
      gaps.pop_back();
    }
  }

  void combine(const std::vector<std::pair<int, int>>& gaps, std::size_t gi, Blocks acc,
               std::vector<Blocks>& out) {
    while (gi < gaps.size() && gaps[gi].second < gaps[gi].first) ++gi;  // skip empty gaps
    if (gi == gaps.size()) {
      out.push_back(std::move(acc));
      return;
    }
    const auto [lo, hi] = gaps[gi];
    for (const Blocks& sub : of_length(hi - lo + 1)) {
      Blocks next = acc;
      for (const std::vector<int>& blk : sub) {
        std::vector<int> shifted(blk.size());
        for (std::size_t i = 0; i < blk.size(); ++i) shifted[i] = blk[i] + lo;
        next.push_back(std::move(shifted));
      }
      combine(gaps, gi + 1, std::move(next), out);
    }
  }

  std::vector<std::vector<Blocks>> cache_;
};

NCPartition finish_partition(int m, Blocks blocks) {
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  NCPartition p;
  p.m = m;
  p.blocks = std::move(blocks);
  const auto nb = p.blocks.size();
  p.parent.assign(nb, -1);
  // Innermost enclosing block by span containment; valid because the
  // partition is non-crossing.
  for (std::size_t i = 0; i < nb; ++i) {
    int best = -1;
    int best_width = 0;
    for (std::size_t j = 0; j < nb; ++j) {
      if (i == j) continue;
      const int lo = p.blocks[j].front(), hi = p.blocks[j].back();
      if (lo < p.blocks[i].front() && p.blocks[i].back() < hi) {
        const int width = hi - lo;
        if (best < 0 || width < best_width) {
          best = static_cast<int>(j);
          best_width = width;
        }
      }
    }
    p.parent[i] = best;
  }
  return p;
}

// kappa_k applied to k-1 spacer arguments:
//   sum_w kappa(w) b_{w_1} A_1 b_{w_2} A_2 ... A_{k-1} b_{w_k}.
ComplexMatrix kappa_apply(const CovarianceModel& model, const CumulantMap& km, int k,
                          const std::vector<const ComplexMatrix*>& args) {
  ComplexMatrix out = ComplexMatrix::Zero(model.N, model.N);
  for (const auto& [w, v] : km) {
    if (v == 0.0) continue;
    ComplexMatrix t = model.coefficients[static_cast<std::size_t>(w[0])];
    for (int j = 1; j < k; ++j)
      t = t * (*args[static_cast<std::size_t>(j - 1)]) *
          model.coefficients[static_cast<std::size_t>(w[j])];
    out += v * t;
  }
  return out;
}

// M_0..M_target for a fixed spacer c (per-evaluation memo table).
std::vector<ComplexMatrix> moments_upto(const CumulantFamily& fam, int target,
                                        const ComplexMatrix& c) {
  const auto N = fam.model.N;
  const ComplexMatrix id = ComplexMatrix::Identity(N, N);
  std::vector<ComplexMatrix> M(static_cast<std::size_t>(target) + 1);
  std::vector<ComplexMatrix> cw(M.size());  // cw[i] = c W_i = c M_i c (cw[0] = c)
  std::vector<ComplexMatrix> cm(M.size());  // cm[i] = c M_i
  M[0] = id;
  cm[0] = c;
  cw[0] = c;

  std::vector<int> parts;
  std::vector<const ComplexMatrix*> args;
  for (int m = 1; m <= target; ++m) {
    ComplexMatrix acc = ComplexMatrix::Zero(N, N);
    for (int k = 1; k <= m; ++k) {
      const CumulantMap& km = fam.cumulants[static_cast<std::size_t>(k)];
      if (km.empty()) continue;
      parts.assign(static_cast<std::size_t>(k), 0);
      args.assign(static_cast<std::size_t>(k - 1), nullptr);
      // Compositions (i_1, ..., i_k) of m - k into nonnegative parts.
      auto walk = [&](auto&& self, int j, int remaining) -> void {
        if (j == k - 1) {
          parts[static_cast<std::size_t>(j)] = remaining;
          for (int a = 0; a + 1 < k; ++a)
            args[static_cast<std::size_t>(a)] = &cw[static_cast<std::size_t>(parts[a])];
          ComplexMatrix val = kappa_apply(fam.model, km, k, args);
          const int tail = parts[static_cast<std::size_t>(k - 1)];
          if (tail == 0)
            acc += val;
          else
            acc += val * cm[static_cast<std::size_t>(tail)];
          return;
        }
        for (int i = 0; i <= remaining; ++i) {
          parts[static_cast<std::size_t>(j)] = i;
          self(self, j + 1, remaining - i);
        }
      };
      walk(walk, 0, m - k);
    }
    M[static_cast<std::size_t>(m)] = acc;
    cm[static_cast<std::size_t>(m)] = c * acc;
    cw[static_cast<std::size_t>(m)] = cm[static_cast<std::size_t>(m)] * c;
  }
  return M;
}

Complex nc_moment_with(const std::vector<NCPartition>& partitions,
                       const std::vector<CumulantMap>& cumulant_maps, const Word& w) {
  Complex total = 0.0;
  Word sub;
  for (const NCPartition& p : partitions) {
    Complex prod = 1.0;
    for (const std::vector<int>& blk : p.blocks) {
      const auto order = blk.size();
      if (order >= cumulant_maps.size()) {
        prod = 0.0;
        break;
      }
      sub.clear();
      for (int pos : blk) sub.push_back(w[static_cast<std::size_t>(pos)]);
      const CumulantMap& km = cumulant_maps[order];
      const auto it = km.find(sub);
      if (it == km.end() || it->second == 0.0) {
        prod = 0.0;
        break;
      }
      prod *= it->second;
    }
    total += prod;
  }
  return total;
}

// sum over compositions of t into k positive-or-zero parts of products of
// moments (m_0 = 1); shared by the scalar conversion routines.
Complex composition_sum(const std::vector<Complex>& mom_with_zero, int k, int t) {
  Complex total = 0.0;
  auto walk = [&](auto&& self, int j, int remaining, Complex prod) -> void {
    if (j == k - 1) {
      total += prod * mom_with_zero[static_cast<std::size_t>(remaining)];
      return;
    }
    for (int i = 0; i <= remaining; ++i)
      self(self, j + 1, remaining - i, prod * mom_with_zero[static_cast<std::size_t>(i)]);
  };
  walk(walk, 0, t, Complex(1.0));
  return total;
}

}  // namespace

std::vector<NCPartition> enumerate_nc(int m) {
  if (m < 1 || m > kMaxEnumerationOrder)
    throw OrderTooLarge("enumerate_nc: order must be in [1, " +
                        std::to_string(kMaxEnumerationOrder) + "], got " + std::to_string(m));
  CanonicalNc gen;
  const std::vector<Blocks>& raw = gen.of_length(m);
  std::vector<NCPartition> out;
  out.reserve(raw.size());
  for (const Blocks& b : raw) out.push_back(finish_partition(m, b));
  return out;
}

CumulantFamily make_cumulant_family(CovarianceModel model, const std::vector<CumulantEntry>& entries,
                                    NormBoundFn norm_bound, int M_max) {
  if (M_max < 2) throw Error("make_cumulant_family: M_max must be >= 2");
  CumulantFamily fam;
  fam.model = std::move(model);
  fam.M_max = M_max;
  fam.norm_bound = std::move(norm_bound);
  fam.cumulants.assign(static_cast<std::size_t>(M_max) + 1, CumulantMap{});

  const int d = static_cast<int>(fam.model.d);
  for (const CumulantEntry& e : entries) {
    const int order = static_cast<int>(e.word.size());
    if (order < 1 || order > M_max)
      throw Error("make_cumulant_family: word order " + std::to_string(order) +
                  " outside [1, M_max]");
    for (int idx : e.word)
      if (idx < 0 || idx >= d)
        throw Error("make_cumulant_family: word index " + std::to_string(idx) +
                    " outside [0, d)");
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()))
      throw Error("make_cumulant_family: non-finite cumulant value");
    if (order == 1 && e.value != 0.0)
      throw Error("make_cumulant_family: family must be centered (order-1 cumulant != 0)");
    auto& km = fam.cumulants[static_cast<std::size_t>(order)];
    if (!km.emplace(e.word, e.value).second)
      throw Error("make_cumulant_family: duplicate word of order " + std::to_string(order));
  }

  // Order-2 data must be the covariance.
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const auto it = fam.cumulants[2].find(Word{k, l});
      const Complex have = (it == fam.cumulants[2].end()) ? Complex(0.0) : it->second;
      if (std::abs(have - fam.model.sigma(k, l)) > 1e-12)
        throw Error("make_cumulant_family: order-2 cumulant (" + std::to_string(k) + "," +
                    std::to_string(l) + ") does not match sigma");
    }
  return fam;
}

CumulantFamily scaled_cumulants(const CumulantFamily& fam, int n) {
  if (n < 1) throw Error("scaled_cumulants: n must be >= 1");
  CumulantFamily out = fam;
  for (std::size_t m = 2; m < out.cumulants.size(); ++m) {
    const double factor = std::pow(static_cast<double>(n), 1.0 - 0.5 * static_cast<double>(m));
    for (auto& [w, v] : out.cumulants[m]) v *= factor;
  }
  if (fam.norm_bound) {
    const double ln = fam.norm_bound(n);
    out.norm_bound = [ln](int) { return ln; };
  }
  return out;
}

CumulantFamily semicircular_family(const CovarianceModel& model) {
  CovarianceModel limit_model = model;
  // Fourth moments of the limit come from the two non-crossing pairings.
  const auto d = static_cast<std::size_t>(model.d);
  std::vector<Complex> wick(d * d * d * d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t r = 0; r < d; ++r)
          wick[m4_index(d, k, l, p, r)] =
              model.sigma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) *
                  model.sigma(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(r)) +
              model.sigma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) *
                  model.sigma(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(p));
  limit_model.fourth_moments = std::move(wick);

  std::vector<CumulantEntry> entries;
  for (int k = 0; k < model.d; ++k)
    for (int l = 0; l < model.d; ++l) {
      const Complex s = model.sigma(k, l);
      if (s != 0.0) entries.push_back({Word{k, l}, s});
    }
  const double bound = 2.0 * std::sqrt(alpha2(model));
  return make_cumulant_family(std::move(limit_model), entries, [bound](int) { return bound; });
}

ComplexMatrix moment(const CumulantFamily& fam, int m, const ComplexMatrix& c) {
  if (m < 0 || m > fam.M_max)
    throw OrderTooLarge("moment: order " + std::to_string(m) + " outside [0, M_max = " +
                        std::to_string(fam.M_max) + "]");
  require_square_finite(c, "moment");
  if (c.rows() != fam.model.N) throw DimensionMismatch("moment: spacer is not N x N");
  return moments_upto(fam, m, c)[static_cast<std::size_t>(m)];
}

ComplexMatrix moment_enumerated(const CumulantFamily& fam, int m, const ComplexMatrix& c) {
  if (m < 1 || m > std::min(fam.M_max, kMaxEnumerationOrder))
    throw OrderTooLarge("moment_enumerated: order " + std::to_string(m) + " not enumerable");
  require_square_finite(c, "moment_enumerated");
  if (c.rows() != fam.model.N) throw DimensionMismatch("moment_enumerated: spacer is not N x N");

  const std::vector<NCPartition> partitions = enumerate_nc(m);
  const int d = static_cast<int>(fam.model.d);
  ComplexMatrix acc = ComplexMatrix::Zero(fam.model.N, fam.model.N);
  Word w(static_cast<std::size_t>(m), 0);
  // Odometer over all d^m index words; E[X c ... X] = sum_w phi(w) b_{w_1} c ... b_{w_m}.
  while (true) {
    const Complex mom = nc_moment_with(partitions, fam.cumulants, w);
    if (mom != 0.0) {
      ComplexMatrix chain = fam.model.coefficients[static_cast<std::size_t>(w[0])];
      for (int j = 1; j < m; ++j)
        chain = chain * c * fam.model.coefficients[static_cast<std::size_t>(w[j])];
      acc += mom * chain;
    }
    int pos = m - 1;
    while (pos >= 0 && w[static_cast<std::size_t>(pos)] == d - 1) {
      w[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++w[static_cast<std::size_t>(pos)];
  }
  return acc;
}

SeriesCauchyValue gn_series(const CumulantFamily& fam, int n, const OperatorPoint& point, int M) {
  if (n < 1) throw Error("gn_series: n must be >= 1");
  if (M < 0 || M > fam.M_max)
    throw OrderTooLarge("gn_series: truncation order outside [0, M_max]");
  if (point.dim() != fam.model.N) throw DimensionMismatch("gn_series: point is not N x N");
  if (!fam.norm_bound) throw Error("gn_series: family carries no certified norm bound");

  const ComplexMatrix binv = point.b.inverse();
  const double binv_norm = operator_norm(binv);
  const double L = fam.norm_bound(n);
  const double rho = L * binv_norm;
  if (!(rho <= 0.9))
    throw ContractionViolated("gn_series: L_n * ||b^-1|| = " + std::to_string(rho) +
                                  " exceeds 0.9; Neumann series refused",
                              rho);

  const CumulantFamily scaled = scaled_cumulants(fam, n);
  const std::vector<ComplexMatrix> mom = moments_upto(scaled, M, binv);

  const auto N = fam.model.N;
  ComplexMatrix series = ComplexMatrix::Identity(N, N);  // m = 0 term of sum E[(S b^-1)^m]
  for (int m = 1; m <= M; ++m) series += mom[static_cast<std::size_t>(m)] * binv;

  SeriesCauchyValue out;
  out.value = binv * series;
  out.truncation_order = M;
  out.contraction_ratio = rho;
  out.tail_budget = binv_norm * std::pow(rho, M + 1) / (1.0 - rho);
  return out;
}

double limit_moment_gap(const CumulantFamily& fam, int n, int m) {
  const ComplexMatrix c = ComplexMatrix::Identity(fam.model.N, fam.model.N) /
                          std::sqrt(static_cast<double>(fam.model.N));
  const CumulantFamily scaled = scaled_cumulants(fam, n);
  const CumulantFamily limit = semicircular_family(fam.model);
  return operator_norm(ComplexMatrix(moment(scaled, m, c) - moment(limit, m, c)));
}

std::vector<Complex> moments_from_cumulant_sequence(const std::vector<Complex>& cumulants) {
  const int M = static_cast<int>(cumulants.size());
  std::vector<Complex> mom_with_zero{Complex(1.0)};  // m_0 = 1
  for (int order = 1; order <= M; ++order) {
    Complex acc = 0.0;
    for (int k = 1; k <= order; ++k) {
      const Complex kap = cumulants[static_cast<std::size_t>(k - 1)];
      if (kap == 0.0) continue;
      acc += kap * composition_sum(mom_with_zero, k, order - k);
    }
    mom_with_zero.push_back(acc);
  }
  return {mom_with_zero.begin() + 1, mom_with_zero.end()};
}

std::vector<Complex> cumulants_from_moment_sequence(const std::vector<Complex>& moments) {
  const int M = static_cast<int>(moments.size());
  std::vector<Complex> mom_with_zero{Complex(1.0)};
  mom_with_zero.insert(mom_with_zero.end(), moments.begin(), moments.end());
  std::vector<Complex> kappa;
  for (int order = 1; order <= M; ++order) {
    Complex acc = mom_with_zero[static_cast<std::size_t>(order)];
    for (int k = 1; k < order; ++k) {
      const Complex kap = kappa[static_cast<std::size_t>(k - 1)];
      if (kap == 0.0) continue;
      acc -= kap * composition_sum(mom_with_zero, k, order - k);
    }
    kappa.push_back(acc);
  }
  return kappa;
}

Complex nc_moment_from_cumulants(const std::vector<CumulantMap>& cumulant_maps, const Word& w) {
  const int m = static_cast<int>(w.size());
  return nc_moment_with(enumerate_nc(m), cumulant_maps, w);
}

std::vector<CumulantMap> nc_cumulants_from_moments(
    const std::function<Complex(const Word&)>& moment_fn, int d, int max_order) {
  if (max_order < 1 || max_order > kMaxEnumerationOrder)
    throw OrderTooLarge("nc_cumulants_from_moments: order outside [1, " +
                        std::to_string(kMaxEnumerationOrder) + "]");
  std::vector<CumulantMap> out(static_cast<std::size_t>(max_order) + 1);
  Word sub;
  for (int m = 1; m <= max_order; ++m) {
    const std::vector<NCPartition> partitions = enumerate_nc(m);
    Word w(static_cast<std::size_t>(m), 0);
    while (true) {
      // kappa(w) = moment(w) - sum over proper partitions of products of
      // lower-order cumulants already computed.
      Complex acc = moment_fn(w);
      for (const NCPartition& p : partitions) {
        if (p.blocks.size() == 1) continue;
        Complex prod = 1.0;
        for (const std::vector<int>& blk : p.blocks) {
          sub.clear();
          for (int pos : blk) sub.push_back(w[static_cast<std::size_t>(pos)]);
          const CumulantMap& km = out[blk.size()];
          const auto it = km.find(sub);
          if (it == km.end() || it->second == 0.0) {
            prod = 0.0;
            break;
          }
          prod *= it->second;
        }
        acc -= prod;
      }
      out[static_cast<std::size_t>(m)][w] = acc;
      int pos = m - 1;
      while (pos >= 0 && w[static_cast<std::size_t>(pos)] == d - 1) {
        w[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++w[static_cast<std::size_t>(pos)];
    }
  }
  return out;
}

}  // namespace freeclt
