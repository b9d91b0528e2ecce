#ifndef PHSLAB_TESTS_FIXTURES_HPP
#define PHSLAB_TESTS_FIXTURES_HPP

#include "phslab/semiconjugacy.hpp"
#include "phslab/systems.hpp"

namespace phslab::testing {

// Shared systems, constructed once per test binary. The construction-time
// certificate is skipped here; the certificates have their own tests.
inline const ToralAutomorphism& cat_matrix() {
  static const ToralAutomorphism a = ToralAutomorphism::from_matrix(2, 1, 1, 1);
  return a;
}

inline const SlabSystem& product_system() {
  static const SlabSystem sys = build_product(cat_matrix(), 0.0);
  return sys;
}

inline const SlabSystem& bump_system() {
  static const SlabSystem sys = [] {
    PerturbedOptions opts;
    opts.certify = false;
    return build_perturbed(cat_matrix(), 0.05, SystemVariant::Bump, opts);
  }();
  return sys;
}

inline const SlabSystem& sink_system() {
  static const SlabSystem sys = [] {
    PerturbedOptions opts;
    opts.certify = false;
    return build_perturbed(cat_matrix(), 1.0, SystemVariant::Sink, opts);
  }();
  return sys;
}

inline const SlabSystem& cu_system() {
  static const SlabSystem sys = [] {
    PerturbedOptions opts;
    opts.certify = false;
    return build_perturbed(cat_matrix(), 0.05, SystemVariant::CuBoundary,
                           opts);
  }();
  return sys;
}

inline const SemiconjugacyEvaluator& product_evaluator() {
  static const SemiconjugacyEvaluator eval(product_system(), 1e-8, 32);
  return eval;
}

inline const SemiconjugacyEvaluator& bump_evaluator() {
  static const SemiconjugacyEvaluator eval(bump_system(), 1e-8, 32);
  return eval;
}

inline const SemiconjugacyEvaluator& sink_evaluator() {
  static const SemiconjugacyEvaluator eval(sink_system(), 1e-8, 32);
  return eval;
}

}  // namespace phslab::testing

#endif
