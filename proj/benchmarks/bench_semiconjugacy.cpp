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

void BM_eval_Hu(benchmark::State& state) {
  const auto& eval = bump_eval();
  const SlabPoint p{{0.37, 0.21}, 0.43};
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.eval_Hu(p));
  }
}
BENCHMARK(BM_eval_Hu);

void BM_eval_H(benchmark::State& state) {
  const auto& eval = bump_eval();
  const SlabPoint p{{0.37, 0.21}, 0.43};
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.eval_H(p));
  }
}
BENCHMARK(BM_eval_H);

}  // namespace
