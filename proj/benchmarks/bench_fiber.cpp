#include <benchmark/benchmark.h>

#include "phslab/semiconjugacy.hpp"

namespace {

using namespace phslab;

const SemiconjugacyEvaluator& bump_eval() {
  static const SemiconjugacyEvaluator eval = [] {
    PerturbedOptions opts;
    opts.certify = false;
    return SemiconjugacyEvaluator(
        build_perturbed(ToralAutomorphism::from_matrix(2, 1, 1, 1), 0.05,
                        SystemVariant::Bump, opts),
        1e-8, 32);
  }();
  return eval;
}

void BM_fiber(benchmark::State& state) {
  const auto& eval = bump_eval();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fiber(eval, PlanePoint(0.5, 0.5)));
  }
}
BENCHMARK(BM_fiber);

}  // namespace
