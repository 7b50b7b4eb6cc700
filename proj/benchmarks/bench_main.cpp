#include <benchmark/benchmark.h>

#include "rabc/engine.hpp"
#include "rabc/models.hpp"
#include "rabc/summaries.hpp"

using namespace rabc;

namespace {

void BM_PhiloxU64(benchmark::State& state) {
  RngStream s(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s.next_u64());
}
BENCHMARK(BM_PhiloxU64);

void BM_SampleNormal(benchmark::State& state) {
  RngStream s(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_normal(s, 0.0, 1.0));
}
BENCHMARK(BM_SampleNormal);

void BM_SampleAlphaStable(benchmark::State& state) {
  RngStream s(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_alpha_stable(s, 1.7, 0.0, 0.0, 1.0));
}
BENCHMARK(BM_SampleAlphaStable);

void BM_SimulateSv(benchmark::State& state) {
  const SvParams p{-0.1, 0.9, 0.3};
  std::uint64_t stream = 0;
  for (auto _ : state) {
    RngStream s(2, stream++);
    benchmark::DoNotOptimize(simulate_sv(p, static_cast<std::size_t>(state.range(0)), s));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateSv)->Arg(1000);

void BM_Autocov(benchmark::State& state) {
  RngStream s(3, 0);
  const Series z = simulate_ma({{0.6, 0.2}}, static_cast<std::size_t>(state.range(0)), s);
  for (auto _ : state) benchmark::DoNotOptimize(autocov(z, 2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Autocov)->Arg(1000)->Arg(100000);

void BM_GarchLoglik(benchmark::State& state) {
  RngStream s(4, 0);
  const Series y = simulate_sv({-0.1, 0.9, 0.3}, 1000, s);
  const std::array<double, 4> beta{0.05, 0.1, 0.85, 8.0};
  for (auto _ : state) benchmark::DoNotOptimize(garch_t_loglik(y, beta));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_GarchLoglik);

void BM_RejectionNormal(benchmark::State& state) {
  const std::size_t n_draws = static_cast<std::size_t>(state.range(0));
  Simulator sim = [](std::span<const double> th, RngStream& s) {
    return simulate_normal(th[0], 100, s);
  };
  SummaryMap sm = [](const Series& z) { return mean_var(z); };
  PriorSpec prior;
  prior.theta = {{MarginalPrior::Kind::Normal, 0.0, 5.0}};
  const SummaryVector eta_y{{0.0, 1.0}, {"mean", "var"}};
  for (auto _ : state) {
    RejectionConfig cfg{n_draws, 0.01, 5, 0, Method::Abc};
    benchmark::DoNotOptimize(
        run_rejection(sim, sm, prior, DistanceSpec::euclidean(), eta_y, cfg));
  }
  state.SetItemsProcessed(state.iterations() * n_draws);
}
BENCHMARK(BM_RejectionNormal)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
