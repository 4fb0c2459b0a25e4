#include <vector>

#include <benchmark/benchmark.h>

#include "rdecusum/design.hpp"
#include "rdecusum/detectors.hpp"
#include "rdecusum/distributions.hpp"
#include "rdecusum/evaluation.hpp"

using namespace rdecusum;

namespace {

const auto kF = DistributionSpec::gaussian(0.0);
const auto kGbar = DistributionSpec::gaussian(0.5);

PolicyParams params_for(int kind) {
  switch (kind) {
    case 0: return PolicyParams::robust_cusum(1e300);
    case 1: return PolicyParams::rde_cusum(1e300, 0.125, 10.0);
    default: return PolicyParams::fractional(1e300, 0.5);
  }
}

// Steps through pre-change LLRs; the threshold is unreachable.
void BM_DetectorStep(benchmark::State& state) {
  const auto llr = llr_function(kF, kGbar);
  Engine engine = make_engine(1, 0);
  Sampler pre(kF);
  std::vector<double> llrs(1 << 16);
  for (auto& v : llrs) v = llr(pre(engine));
  Detector detector(params_for(static_cast<int>(state.range(0))), 3);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto action = detector.next_action();
    benchmark::DoNotOptimize(detector.update(action == Action::Sample ? std::optional(llrs[i]) : std::nullopt));
    i = (i + 1) & (llrs.size() - 1);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DetectorStep)->Arg(0)->Arg(1)->Arg(2)->ArgName("kind");

void BM_LlrGaussian(benchmark::State& state) {
  const auto llr = llr_function(kF, kGbar);
  Engine engine = make_engine(2, 0);
  Sampler pre(kF);
  for (auto _ : state) benchmark::DoNotOptimize(llr(pre(engine)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LlrGaussian);

void BM_LlrPoisson(benchmark::State& state) {
  const auto f = DistributionSpec::poisson(0.5);
  const auto llr = llr_function(f, DistributionSpec::poisson(1.0));
  Engine engine = make_engine(3, 0);
  Sampler pre(f);
  for (auto _ : state) benchmark::DoNotOptimize(llr(pre(engine)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LlrPoisson);

void BM_EstimateFar(benchmark::State& state) {
  const ExperimentConfig cfg{kF,
                             PostChangeFamily::gaussian_mean_at_least(0.5),
                             kGbar,
                             PolicyParams::rde_cusum(threshold_for_far(0.01), 0.125, 10.0),
                             std::nullopt,
                             static_cast<std::uint64_t>(state.range(0)),
                             100'000,
                             11,
                             0};
  for (auto _ : state) benchmark::DoNotOptimize(estimate_far(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateFar)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PdcRenewal(benchmark::State& state) {
  const auto params = PolicyParams::rde_cusum(threshold_for_far(0.01), 0.125, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_pdc_renewal(kF, kGbar, params, static_cast<std::uint64_t>(state.range(0)), 5));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PdcRenewal)->Arg(10'000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
