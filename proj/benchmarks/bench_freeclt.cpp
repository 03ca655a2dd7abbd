// Microbenchmarks for the hot paths: the fixed-point solver, the truncated
// resolvent series, partition enumeration and the moment recursion.
#include <complex>
#include <vector>

#include <benchmark/benchmark.h>

#include <freeclt/covariance.hpp>
#include <freeclt/cumulants.hpp>
#include <freeclt/mde.hpp>
#include <freeclt/scalar_lab.hpp>

namespace {

using namespace freeclt;
const Complex I(0.0, 1.0);

// N = 8, d = 2 model with dense Hermitian coefficients.
CovarianceModel dense_model() {
  const Eigen::Index N = 8;
  std::vector<ComplexMatrix> coeffs;
  for (int k = 0; k < 2; ++k) {
    ComplexMatrix a(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j)
        a(i, j) = Complex(std::sin(double(17 * k + 3 * i + j + 1)),
                          std::cos(double(5 * k + i + 7 * j)));
    ComplexMatrix h = (a + a.adjoint()) / 2.0;
    coeffs.push_back(h / operator_norm(h));
  }
  ComplexMatrix sigma(2, 2);
  sigma << 1.0, 0.25, 0.25, 1.0;
  return make_model(N, std::move(coeffs), sigma, std::nullopt);
}

void BM_SolveMdeScalar(benchmark::State& state) {
  const CovarianceModel model = make_scalar_model(1.0, std::nullopt);
  const OperatorPoint pt = lift_scalar_point(2.0 * I, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mde(model, pt));
  }
}
BENCHMARK(BM_SolveMdeScalar);

void BM_SolveMdeDense8(benchmark::State& state) {
  const CovarianceModel model = dense_model();
  const OperatorPoint pt = lift_scalar_point(Complex(0.5, 1.0), 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mde(model, pt));
  }
}
BENCHMARK(BM_SolveMdeDense8);

void BM_GnSeries(benchmark::State& state) {
  const CumulantFamily bern = to_cumulant_family(make_bernoulli_family());
  const OperatorPoint pt = lift_scalar_point(3.0 * I, 1);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gn_series(bern, n, pt, 16));
  }
}
BENCHMARK(BM_GnSeries)->Arg(4)->Arg(64);

void BM_EnumerateNc(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_nc(m));
  }
}
BENCHMARK(BM_EnumerateNc)->Arg(8)->Arg(10);

void BM_MomentRecursion(benchmark::State& state) {
  const CumulantFamily bern = to_cumulant_family(make_bernoulli_family());
  const ComplexMatrix c = ComplexMatrix::Identity(1, 1) * Complex(0.0, -0.3);
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(moment(bern, m, c));
  }
}
BENCHMARK(BM_MomentRecursion)->Arg(8)->Arg(16);

void BM_FreePowerCauchy(benchmark::State& state) {
  const ScalarFamily bern = make_bernoulli_family();
  const Complex z(0.3, 0.05);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(free_power_cauchy(bern, n, z));
  }
}
BENCHMARK(BM_FreePowerCauchy)->Arg(2)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
