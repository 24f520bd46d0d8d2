#include <benchmark/benchmark.h>

#include "bshq/action.hpp"
#include "bshq/eigensolver.hpp"
#include "bshq/expression.hpp"
#include "bshq/identity_suite.hpp"
#include "bshq/models.hpp"

using namespace bshq;

namespace {

void BM_DiracRecursion(benchmark::State &state) {
  const auto n = state.range(0);
  for (auto _ : state) {
    QuantizedModel q(model_so3(static_cast<int>(n)), LatticeConfig(1.0, 1), {});
    benchmark::DoNotOptimize(q.coefficients(0).beta.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_DiracRecursion)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_Commutator(benchmark::State &state) {
  QuantizedModel q(model_ho2d(), LatticeConfig(1.0, 2),
                   {{0, state.range(0)}, {0, state.range(0)}});
  LatticeOperator a = q.chi(0), b = adjoint(q.chi(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(commutator(a, b).max_abs());
}
BENCHMARK(BM_Commutator)->Arg(10)->Arg(40)->Arg(100);

void BM_Eigenvalues(benchmark::State &state) {
  QuantizedModel q(model_so3(static_cast<int>(state.range(0))),
                   LatticeConfig(1.0, 1), {});
  LatticeOperator j1 = q.observable("J1");
  for (auto _ : state)
    benchmark::DoNotOptimize(eigenvalues_hermitian(j1).front());
}
BENCHMARK(BM_Eigenvalues)->Arg(10)->Arg(50)->Arg(200);

void BM_IdentitySuite(benchmark::State &state) {
  QuantizedModel q(model_ho2d(), LatticeConfig(1.0, 2), {{0, 15}, {0, 15}});
  for (auto _ : state)
    benchmark::DoNotOptimize(run_identity_suite(q).pass());
}
BENCHMARK(BM_IdentitySuite);

void BM_PendulumLevels(benchmark::State &state) {
  const double hbar = 1.0 / static_cast<double>(state.range(0));
  OneDofSystem sys = pendulum_system();
  for (auto _ : state)
    benchmark::DoNotOptimize(bs_energy_levels(sys, hbar).levels.size());
}
BENCHMARK(BM_PendulumLevels)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ParseDifferentiate(benchmark::State &state) {
  for (auto _ : state) {
    Expression e = parse_expression("sqrt(r^2 - A1^2)*sin(alpha)^3 + exp(-A1/2)");
    benchmark::DoNotOptimize(differentiate(e, "A1"));
  }
}
BENCHMARK(BM_ParseDifferentiate);

} // namespace
BENCHMARK_MAIN();
