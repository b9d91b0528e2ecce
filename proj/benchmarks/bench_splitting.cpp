#include <benchmark/benchmark.h>

#include "phslab/splitting.hpp"

namespace {

using namespace phslab;

const SlabSystem& bump() {
  static const SlabSystem sys = [] {
    PerturbedOptions opts;
    opts.certify = false;
    return build_perturbed(ToralAutomorphism::from_matrix(2, 1, 1, 1), 0.05,
                           SystemVariant::Bump, opts);
  }();
  return sys;
}

void BM_splitting_sample(benchmark::State& state) {
  const SlabSystem& sys = bump();
  const SlabPoint p{{0.37, 0.21}, 0.43};
  for (auto _ : state) {
    benchmark::DoNotOptimize(splitting_sample(sys, p));
  }
}
BENCHMARK(BM_splitting_sample);

void BM_center_direction(benchmark::State& state) {
  const SlabSystem& sys = bump();
  const SlabPoint p{{0.37, 0.21}, 0.43};
  for (auto _ : state) {
    benchmark::DoNotOptimize(center_direction(sys, p, 140, 1e-6));
  }
}
BENCHMARK(BM_center_direction);

}  // namespace
