// Serial reference kernels against their OpenMP counterparts on a square instance.
// Thread count comes from OMP_NUM_THREADS.

#include "wlra/kernels.hpp"
#include "wlra/matcore.hpp"
#include "wlra/synth.hpp"

#include <benchmark/benchmark.h>

#include <map>

namespace {

using namespace wlra;

struct Instance {
  DenseMatrix m, w, y;
};

const Instance& instance(Index n) {
  static std::map<Index, Instance> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const Index k = 5;
  const GroundTruth truth = gen_ground_truth(n, k, 2.0, static_cast<double>(n) / k, 7);
  Instance in;
  in.w = gen_weights(n, {weights::BernoulliInverseP{0.5}, 7});
  in.m = truth.matrix();
  in.y = truth.v().matrix();
  return cache.emplace(n, std::move(in)).first->second;
}

template <auto Fn>
void bm_weighted_ls(benchmark::State& state) {
  const Instance& in = instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(in.m, in.w, in.y, kDefaultRankTol));
}

template <auto Fn>
void bm_hadamard(benchmark::State& state) {
  const Instance& in = instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(in.w, in.m));
}

template <auto Fn>
void bm_gram_extremes(benchmark::State& state) {
  const Instance& in = instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(in.w, in.y));
}

template <auto Fn>
void bm_matvec(benchmark::State& state) {
  const Instance& in = instance(state.range(0));
  const Vector x = Vector::Ones(in.m.cols());
  for (auto _ : state) benchmark::DoNotOptimize(Fn(in.m, x));
}

}  // namespace

BENCHMARK(bm_weighted_ls<kernels::serial::weighted_ls_rows>)->Name("weighted_ls/serial")->Arg(200)->Arg(800);
BENCHMARK(bm_weighted_ls<kernels::omp::weighted_ls_rows>)->Name("weighted_ls/omp")->Arg(200)->Arg(800);
BENCHMARK(bm_hadamard<kernels::serial::hadamard>)->Name("hadamard/serial")->Arg(200)->Arg(800);
BENCHMARK(bm_hadamard<kernels::omp::hadamard>)->Name("hadamard/omp")->Arg(200)->Arg(800);
BENCHMARK(bm_gram_extremes<kernels::serial::row_gram_extremes>)->Name("gram_extremes/serial")->Arg(200)->Arg(800);
BENCHMARK(bm_gram_extremes<kernels::omp::row_gram_extremes>)->Name("gram_extremes/omp")->Arg(200)->Arg(800);
BENCHMARK(bm_matvec<kernels::serial::matvec>)->Name("matvec/serial")->Arg(200)->Arg(800);
BENCHMARK(bm_matvec<kernels::omp::matvec>)->Name("matvec/omp")->Arg(200)->Arg(800);

BENCHMARK_MAIN();
