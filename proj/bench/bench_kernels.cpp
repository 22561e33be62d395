// Serial reference vs OpenMP path for the hot loops. The kernel benchmarks
// use OMP_NUM_THREADS; the bias benchmark sets its thread count itself.

#include "soprc/distributions.hpp"
#include "soprc/kernels.hpp"
#include "soprc/metrics.hpp"
#include "soprc/simlab.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <string>
#include <thread>

namespace {

soprc::ScoreSet population(std::size_t size) {
  soprc::Rng rng = soprc::RngHandle{7, 0}.stream();
  return soprc::draw_population(soprc::ScoreDistribution::defaults(soprc::DistKind::binormal),
                                size, 0.1, rng);
}

soprc::Exec exec_of(const benchmark::State& st) {
  return st.range(1) == 0 ? soprc::Exec::serial : soprc::Exec::parallel;
}

void label(benchmark::State& st) { st.SetLabel(st.range(1) == 0 ? "serial" : "parallel"); }

void BM_fpr_terms(benchmark::State& st) {
  const auto s = population(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(soprc::kernels::fpr_terms(s.pos, s.neg, 1.0, exec_of(st)));
  label(st);
}

void BM_tpr_terms(benchmark::State& st) {
  const auto s = population(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(soprc::kernels::tpr_terms(s.pos, s.pos, 0.1, exec_of(st)));
  label(st);
}

void BM_surrogate_risk(benchmark::State& st) {
  const auto s = population(static_cast<std::size_t>(st.range(0)));
  const soprc::SurrogateParams p{1.0, 0.1, s.prior(), 1e-8};
  for (auto _ : st) benchmark::DoNotOptimize(soprc::surrogate_risk(s, p, exec_of(st)));
  label(st);
}

// Whole bias experiment; the second argument is the thread count.
void BM_bias_repeats(benchmark::State& st) {
  soprc::BiasExperimentSpec spec;
  spec.population_size = 20000;
  spec.repeats = 50;
  const auto pop = soprc::make_bias_population(spec);
  soprc::set_num_threads(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(soprc::run_bias_experiment(pop, spec));
  st.SetLabel("threads=" + std::to_string(st.range(1)));
  soprc::set_num_threads(1);
}

const long kHw = std::max(1L, static_cast<long>(std::thread::hardware_concurrency()));

}  // namespace

BENCHMARK(BM_fpr_terms)->ArgsProduct({{1000, 10000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tpr_terms)->ArgsProduct({{1000, 10000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_surrogate_risk)->ArgsProduct({{10000, 50000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bias_repeats)->Args({0, 1})->Args({0, kHw})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
