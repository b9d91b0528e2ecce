#include <benchmark/benchmark.h>

#include "phslab/systems.hpp"

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

void BM_forward(benchmark::State& state) {
  const SlabSystem& sys = bump();
  SlabPoint p{{0.37, 0.21}, 0.43};
  for (auto _ : state) {
    p = sys.forward(p);
    p.v = reduce_mod_lattice(p.v).first;
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_forward);

void BM_inverse(benchmark::State& state) {
  const SlabSystem& sys = bump();
  SlabPoint p{{0.37, 0.21}, 0.43};
  for (auto _ : state) {
    p = sys.inverse(p);
    p.v = reduce_mod_lattice(p.v).first;
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_inverse);

void BM_derivative(benchmark::State& state) {
  const SlabSystem& sys = bump();
  const SlabPoint p{{0.37, 0.21}, 0.43};
  for (auto _ : state) {
    Mat3 d = sys.derivative(p);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_derivative);

}  // namespace

BENCHMARK_MAIN();
