#include <benchmark/benchmark.h>

#include "mgdm/linalg.hpp"
#include "mgdm/models.hpp"
#include "mgdm/overlaps.hpp"
#include "mgdm/theory.hpp"

namespace {

void BM_FitModel(benchmark::State& state) {
  int d = int(state.range(0));
  int n = d / 2;
  auto model = mgdm::models::make_spiked_model(d, 2.0, 11);
  auto data = mgdm::models::sample_dataset(model, n, 12);
  for (auto _ : state) {
    mgdm::linalg::GenerativeModel fit(data.samples, 0.1);
    benchmark::DoNotOptimize(fit.top_eigenpair().value);
  }
}
BENCHMARK(BM_FitModel)->Arg(250)->Arg(500)->Arg(1000);

void BM_ConvergenceOverlap(benchmark::State& state) {
  int d = int(state.range(0));
  auto model = mgdm::models::make_spiked_model(d, 2.0, 21);
  auto data_a = mgdm::models::sample_dataset(model, d, 22);
  auto data_b = mgdm::models::sample_dataset(model, d, 23);
  mgdm::linalg::GenerativeModel fit_a(data_a.samples, 0.1);
  mgdm::linalg::GenerativeModel fit_b(data_b.samples, 0.1);
  for (auto _ : state) {
    auto e = mgdm::overlaps::convergence_overlap(fit_a, fit_b, 8, 31);
    benchmark::DoNotOptimize(e.mean);
  }
}
BENCHMARK(BM_ConvergenceOverlap)->Arg(250)->Arg(500);

void BM_QAnalytical(benchmark::State& state) {
  double gamma = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mgdm::theory::q_analytical(gamma, 0.1));
  }
}
BENCHMARK(BM_QAnalytical);

void BM_KLDivergence(benchmark::State& state) {
  for (auto _ : state) {
    auto kl = mgdm::theory::kl_divergence(1.0, 0.0);
    benchmark::DoNotOptimize(kl.d_exact);
  }
}
BENCHMARK(BM_KLDivergence);

}  // namespace

BENCHMARK_MAIN();
