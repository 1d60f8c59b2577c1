// Serial-vs-parallel comparison for the per-sample kernels. The parallel
// versions must win on wide sample spaces and match the serial reference
// bitwise (the tests assert the latter; this target measures the former).

#include <benchmark/benchmark.h>

#include "expfact/matfunc.hpp"

using namespace expfact;

namespace {

std::uint64_t state = 99;
double urand() {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return double((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
}

MatrixOverAlgebra make_input(std::size_t n, std::size_t samples) {
  SpacePtr sp = SampleSpace::interval_path(samples);
  MatrixOverAlgebra m(n, sp);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Complex> c(4);
      for (auto& x : c) x = Complex(0.5 * (2 * urand() - 1), 0.5 * (2 * urand() - 1));
      m.set(i, j, AlgebraElement::from_poly(sp, c));
    }
  return m;
}

void bench_exp(benchmark::State& st, Exec exec) {
  const MatrixOverAlgebra b = make_input(std::size_t(st.range(0)), std::size_t(st.range(1)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(mat_exp(b, exec));
  }
}

void bench_spectrum(benchmark::State& st, Exec exec) {
  const MatrixOverAlgebra a = mat_exp(make_input(std::size_t(st.range(0)), std::size_t(st.range(1))));
  for (auto _ : st) {
    benchmark::DoNotOptimize(spectrum(a, exec));
  }
}

void bench_log(benchmark::State& st, Exec exec) {
  const MatrixOverAlgebra a = mat_exp(make_input(std::size_t(st.range(0)), std::size_t(st.range(1))));
  const double theta = choose_branch_angle(spectrum(a));
  for (auto _ : st) {
    benchmark::DoNotOptimize(mat_log_branch(a, theta, exec));
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_exp, serial, Exec::Serial)->Args({4, 4097});
BENCHMARK_CAPTURE(bench_exp, parallel, Exec::Parallel)->Args({4, 4097});
BENCHMARK_CAPTURE(bench_spectrum, serial, Exec::Serial)->Args({4, 4097});
BENCHMARK_CAPTURE(bench_spectrum, parallel, Exec::Parallel)->Args({4, 4097});
BENCHMARK_CAPTURE(bench_log, serial, Exec::Serial)->Args({4, 2049});
BENCHMARK_CAPTURE(bench_log, parallel, Exec::Parallel)->Args({4, 2049});

BENCHMARK_MAIN();
