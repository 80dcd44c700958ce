#include <benchmark/benchmark.h>

#include <cmath>

#include "polyharm/fundsol.hpp"
#include "polyharm/harness.hpp"
#include "polyharm/psi.hpp"
#include "polyharm/symexpr.hpp"

using namespace polyharm;

namespace {

// args: m, n
void BM_SymbolicPolyharmonic(benchmark::State& state) {
  const ProblemParams p{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  const SymExpr phi = phi_unit(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(is_zero(laplacian_iter(phi, p.m)));
  }
}
BENCHMARK(BM_SymbolicPolyharmonic)->Args({1, 3})->Args({2, 2})->Args({3, 5})->Args({4, 9});

void BM_CompiledEval(benchmark::State& state) {
  const ProblemParams p{4, 8};
  const CompiledExpr f(laplacian_iter(phi_unit(p), 2));
  Point x{0.3, -0.2, 0.1, 0.4, 0.05, -0.1, 0.2, 0.3};
  for (auto _ : state) {
    x[0] += 1e-9;
    benchmark::DoNotOptimize(f(std::span<const double>(x)));
  }
}
BENCHMARK(BM_CompiledEval);

void BM_PsiValue(benchmark::State& state) {
  const PsiKernel k({static_cast<int>(state.range(0)), static_cast<int>(state.range(1))});
  const auto n = static_cast<std::size_t>(state.range(1));
  Point x(n, 0.2), y(n, 0.0);
  y[0] = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi_value(k, x, y));
  }
}
BENCHMARK(BM_PsiValue)->Args({2, 2})->Args({3, 6})->Args({4, 9});

void BM_FdLaplacian(benchmark::State& state) {
  const int sigma = static_cast<int>(state.range(0));
  const CompiledExpr f(phi_unit({3, 5}));
  const ScalarFieldLd g = [&f](std::span<const long double> x) { return f(x); };
  const Point x{0.4, 0.1, -0.2, 0.3, 0.05};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fd_laplacian_iter(g, sigma, x, 0.05).value);
  }
}
BENCHMARK(BM_FdLaplacian)->Arg(1)->Arg(2)->Arg(3);

void BM_BallQuadrature(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Point c(static_cast<std::size_t>(n), 0.0);
  const ScalarField f = [](std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::pow(1 - s, 6) / std::sqrt(s + 0.01);
  };
  BallQuadratureOptions opts;
  opts.tol = 1e-8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_ball(f, c, 1.0, opts).value);
  }
}
BENCHMARK(BM_BallQuadrature)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_RepresentationN(benchmark::State& state) {
  const PsiKernel k({2, 3});
  const Bump f{Point(3, 0.0), 0.5, 6};
  const Point x{0.2, 0.1, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(representation_N(k, f, x, 4));
  }
}
BENCHMARK(BM_RepresentationN)->Unit(benchmark::kMillisecond);

void BM_Counterexample(benchmark::State& state) {
  const ProblemParams p{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  const Gauge psi = parse_gauge("r^-1");
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_counterexample(p, psi, 4).certified);
  }
}
BENCHMARK(BM_Counterexample)->Args({1, 3})->Args({3, 6})->Unit(benchmark::kMillisecond);

void BM_SignTable(benchmark::State& state) {
  const ProblemParams p{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_signs(p).pass);
  }
}
BENCHMARK(BM_SignTable)->Args({4, 8})->Args({4, 7})->Args({4, 9});

}  // namespace

BENCHMARK_MAIN();
