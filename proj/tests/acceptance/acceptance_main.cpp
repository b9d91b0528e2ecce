// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "phslab/checks.hpp"
#include "phslab/config.hpp"
#include "phslab/parallel.hpp"
#include "phslab/ragged.hpp"
#include "phslab/semiconjugacy.hpp"
#include "phslab/splitting.hpp"
#include "phslab/systems.hpp"
#include "phslab/tracing.hpp"

using namespace phslab;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

const ToralAutomorphism& cat() {
  static const auto a = ToralAutomorphism::from_matrix(2, 1, 1, 1);
  return a;
}

SlabSystem make_preset(const std::string& name) {
  RunConfig cfg;
  cfg.preset = name;
  PerturbedOptions opts;  // tuned defaults; certificates run separately
  opts.certify = false;
  if (name == "product") return build_product(cat(), 0.0);
  if (name == "bump") return build_perturbed(cat(), 0.05, SystemVariant::Bump, opts);
  if (name == "sink") return build_perturbed(cat(), 1.0, SystemVariant::Sink, opts);
  return build_perturbed(cat(), 0.05, SystemVariant::CuBoundary, opts);
}

// ---- criterion 1: product-system exactness --------------------------------

void criterion_1() {
  Timer timer;
  const SlabSystem sys = make_preset("product");
  const SemiconjugacyEvaluator eval(sys, 1e-8, 32);

  // max over a 64^3 grid of ||H(p) - v||
  const int n = 64;
  const long total = static_cast<long>(n) * n * n;
  std::vector<double> errs(static_cast<std::size_t>(total));
  parallel_for(static_cast<std::size_t>(total), 0, [&](std::size_t idx) {
    const int i = static_cast<int>(idx % n);
    const int j = static_cast<int>((idx / n) % n);
    const int k = static_cast<int>(idx / (static_cast<long>(n) * n));
    const SlabPoint p{PlanePoint((i + 0.5) / n, (j + 0.5) / n),
                      static_cast<double>(k) / (n - 1)};
    errs[idx] = (eval.eval_H(p) - p.v).norm();
  });
  double max_h = 0.0;
  for (double e : errs) max_h = std::max(max_h, e);

  // fibers are vertical unit segments
  double max_len_err = 0.0, max_vert_dev = 0.0;
  bool faces_ok = true;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 16; ++k) {
    const PlanePoint v(U(rng) * 2.0 - 1.0, U(rng) * 2.0 - 1.0);
    const FiberSegment fib = fiber(eval, v);
    max_len_err = std::max(max_len_err, std::abs(fib.arclength() - 1.0));
    for (const auto& q : fib.vertices) {
      max_vert_dev = std::max(max_vert_dev, (q.v - v).norm());
    }
    faces_ok = faces_ok && fib.endpoint_faces[0] == 0 &&
               fib.endpoint_faces[1] == 1;
  }

  // averaged height against the closed form (2s+1)/4 at T = 1
  const HeightField height(eval, 1.0);
  double max_avg_err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const SlabPoint x{PlanePoint(U(rng), U(rng)), 0.01 + 0.98 * U(rng)};
    max_avg_err = std::max(
        max_avg_err, std::abs(height.average_p(x) - (2.0 * x.s + 1.0) / 4.0));
  }

  const double elapsed = timer.seconds();
  const bool pass = max_h <= 1e-9 && max_len_err <= 1e-9 &&
                    max_vert_dev <= 1e-9 && faces_ok && max_avg_err <= 1e-6 &&
                    elapsed <= 30.0;
  report(1, pass,
         fmt("product exactness: max|H-v|=%.2e (64^3), fiber len err=%.2e, "
             "vertical dev=%.2e, avg err=%.2e, %.1fs",
             max_h, max_len_err, max_vert_dev, max_avg_err, elapsed));
}

// ---- criterion 2: semiconjugacy functional equation ------------------------

void criterion_2() {
  const SlabSystem sys = make_preset("bump");
  const SemiconjugacyEvaluator eval(sys, 1e-8, 32);
  const auto& lin = sys.linear_model();
  const double bound = (lin.lambda_u() + 1.0) * 1e-8;

  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<SlabPoint> pts;
  for (int i = 0; i < 1000; ++i) {
    pts.push_back({PlanePoint(2.0 * U(rng) - 1.0, 2.0 * U(rng) - 1.0),
                   U(rng)});
  }
  std::vector<double> resid(pts.size()), equiv(pts.size());
  const std::vector<LatticeVector> zs = {{1, 0}, {0, 1}, {3, -2}};
  parallel_for(pts.size(), 0, [&](std::size_t i) {
    const SlabPoint& p = pts[i];
    resid[i] = (eval.eval_H(sys.forward(p)) - lin.apply(eval.eval_H(p))).norm();
    const LatticeVector z = zs[i % zs.size()];
    equiv[i] =
        (eval.eval_H(p + z) - eval.eval_H(p) - z.to_plane()).norm();
  });
  double max_resid = 0.0, max_equiv = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    max_resid = std::max(max_resid, resid[i]);
    max_equiv = std::max(max_equiv, equiv[i]);
  }
  const bool pass = max_resid <= bound && max_equiv <= 2e-8;
  report(2, pass,
         fmt("bump functional equation: max|H(fp)-AH(p)|=%.2e (<= %.2e), "
             "equivariance=%.2e (<= 2e-8), 1000 points",
             max_resid, bound, max_equiv));
}

// ---- criterion 3: depth stability ------------------------------------------

void criterion_3() {
  bool pass = true;
  std::string detail = "depth +5 stability:";
  for (const char* name : {"product", "bump", "sink", "cu-boundary"}) {
    const SlabSystem sys = make_preset(name);
    const SemiconjugacyEvaluator eval(sys, 1e-8, 32);
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<SlabPoint> pts;
    for (int i = 0; i < 1000; ++i) {
      pts.push_back({PlanePoint(U(rng), U(rng)), U(rng)});
    }
    std::vector<double> devs(pts.size());
    parallel_for(pts.size(), 0, [&](std::size_t i) {
      const SlabPoint& p = pts[i];
      const double du = std::abs(eval.eval_Hu_depth(p, eval.depth_u()) -
                                 eval.eval_Hu_depth(p, eval.depth_u() + 5));
      const double ds = std::abs(eval.eval_Hs_depth(p, eval.depth_s()) -
                                 eval.eval_Hs_depth(p, eval.depth_s() + 5));
      devs[i] = std::max(du, ds);
    });
    double worst = 0.0;
    for (double d : devs) worst = std::max(worst, d);
    pass = pass && worst <= 1e-8;
    detail += fmt(" %s=%.2e", name, worst);
  }
  report(3, pass, detail + " (<= 1e-8, 1000 points each)");
}

// ---- criterion 4: boundary dynamics suite -----------------------------------

void criterion_4() {
  bool pass = true;
  std::string detail = "face checks (>=100 samples each):";
  for (const char* name : {"bump", "sink"}) {
    const SlabSystem sys = make_preset(name);
    for (int face = 0; face < 2; ++face) {
      const SurfaceSystem g = sys.restrict_to_boundary(face);
      const SurfaceSemiconjugacy h(g, 1e-8);
      CheckOptions opts;
      opts.n_samples = 100;
      opts.seed = 20260810;
      opts.stable_leaf_length = 12.0;
      const CheckReport reports[] = {
          check_center_unstable_correspondence(g, h, opts),
          check_center_stable_single_crossing(g, opts),
          check_stable_projection_homeo(g, h, opts),
          check_center_monotone(g, h, opts),
      };
      long viol = 0, samples_min = 1 << 30;
      for (const auto& r : reports) {
        viol += r.violations;
        samples_min = std::min(samples_min, r.samples);
      }
      pass = pass && viol == 0 && samples_min >= 100;
      detail += fmt(" %s:f%d v=%ld", name, face, viol);

      if (face == 0) {
        CheckOptions corrupted = opts;
        corrupted.inject_fault = true;
        corrupted.n_samples = 20;
        const bool duals_fire =
            check_center_unstable_correspondence(g, h, corrupted).violations >
                0 &&
            check_center_stable_single_crossing(g, corrupted).violations > 0 &&
            check_stable_projection_homeo(g, h, corrupted).violations > 0 &&
            check_center_monotone(g, h, corrupted).violations > 0;
        pass = pass && duals_fire;
        detail += duals_fire ? "+duals" : "+DUALS-SILENT";
      }
    }
  }
  report(4, pass, detail);
}

// ---- criterion 5: leaf-coordinate correspondence ----------------------------

void criterion_5() {
  const SlabSystem sys = make_preset("bump");
  const SemiconjugacyEvaluator eval(sys, 1e-8, 32);
  CheckOptions opts;
  opts.n_samples = 200;
  opts.seed = 20260810;
  const CheckReport cs = check_cs_leaf_constant_hu(eval, true, opts);
  const CheckReport cu = check_cs_leaf_constant_hu(eval, false, opts);
  const bool pass = cs.passed() && cu.passed() && cs.samples >= 400 &&
                    cu.samples >= 400 && cs.margin > 0.0 && cu.margin > 0.0;
  report(5, pass,
         fmt("bump leaf coordinates: cs %ld samples %ld viol (delta0=%.3e), "
             "cu %ld samples %ld viol (delta0=%.3e)",
             cs.samples, cs.violations, cs.margin, cu.samples, cu.violations,
             cu.margin));
}

// ---- criterion 6: unstable growth -------------------------------------------

void criterion_6() {
  const SlabSystem sys = make_preset("bump");
  const SemiconjugacyEvaluator eval(sys, 1e-8, 32);
  CheckOptions opts;
  opts.n_samples = 100;  // 20 seeds
  opts.growth_nmax = 8;
  opts.seed = 20260810;
  const CheckReport r = check_unstable_growth(eval, opts);
  const bool pass = r.passed() && r.margin >= 1.0 - 1e-6;
  report(6, pass,
         fmt("unstable growth: %ld samples, %ld violations, min ratio/floor "
             "= %.6f, no cs-face re-touch",
             r.samples, r.violations, r.margin));
}

// ---- criterion 7: ragged profile -------------------------------------------

void criterion_7() {
  const SlabSystem sink = make_preset("sink");
  const SemiconjugacyEvaluator eval(sink, 1e-8, 32);
  const double T = fiber_length_bound(eval, 8);
  const HeightField height(eval, T);

  RunConfig cfg;
  cfg.preset = "sink";
  PlanePoint from, to;
  default_transect(cfg, sink.linear_model(), &from, &to);

  const RaggedProfile coarse = ragged_profile(eval, height, from, to, 200, 0);
  const RaggedProfile fine = ragged_profile(eval, height, from, to, 399, 0);

  bool jump_ok = !coarse.jumps.empty();
  double ratio = coarse.median_step > 0.0
                     ? coarse.max_step / coarse.median_step
                     : 0.0;
  jump_ok = jump_ok && ratio >= 10.0;

  // the jump location must be stable within one coarse cell under 2x
  // refinement (the fine grid contains the coarse points)
  bool location_ok = !coarse.jumps.empty() && !fine.jumps.empty();
  if (location_ok) {
    const double coarse_cell = 1.0 / 199.0;
    const double tc = coarse.t[static_cast<std::size_t>(coarse.jumps[0])];
    double best = 1.0;
    for (long j : fine.jumps) {
      best = std::min(best,
                      std::abs(fine.t[static_cast<std::size_t>(j)] - tc));
    }
    location_ok = best <= coarse_cell + 1e-12;
  }

  // the product preset has no jumps
  const SlabSystem prod = make_preset("product");
  const SemiconjugacyEvaluator peval(prod, 1e-8, 32);
  const HeightField pheight(peval, 1.25);
  const RaggedProfile pprof =
      ragged_profile(peval, pheight, from, to, 200, 0);

  const bool pass = jump_ok && location_ok && pprof.jumps.empty();
  report(7, pass,
         fmt("ragged profile: sink jumps=%zu (max/median=%.1f), location "
             "stable=%s, product jumps=%zu",
             coarse.jumps.size(), ratio, location_ok ? "yes" : "NO",
             pprof.jumps.size()));
}

// ---- criterion 8: conjugacy normal form -------------------------------------

void criterion_8() {
  const SlabSystem sys = make_preset("bump");
  const SemiconjugacyEvaluator eval(sys, 1e-8, 32);
  const double T = fiber_length_bound(eval, 8);
  const HeightField height(eval, T);

  ChartGrid grid;
  grid.n1 = 32;
  grid.n2 = 32;
  grid.ns = 32;
  const RaggedChart chart = build_chart(eval, height, grid, 0);
  const auto resid = conjugacy_residual(eval, height, chart, 64, 0);

  // slope of p along fibers
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst_slope_dev = 0.0;
  for (int k = 0; k < 20; ++k) {
    const FiberSegment fib = fiber(eval, PlanePoint(U(rng), U(rng)));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int m = 0; m <= 20; ++m) {
      const double t = fib.arclength() * m / 20.0;
      const double p = height.average(fib, t);
      sx += t;
      sy += p;
      sxx += t * t;
      sxy += t * p;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    worst_slope_dev = std::max(
        worst_slope_dev, std::abs(slope * 2.0 * T - 1.0));
  }

  const bool pass = resid.max_residual <= 1e-6 &&
                    chart.min_output_separation > 0.0 &&
                    worst_slope_dev <= 0.01;
  report(8, pass,
         fmt("conjugacy normal form (32^3 chart): plane residual=%.2e "
             "(<= 1e-6), min output separation=%.2e, slope dev=%.3f%% "
             "(T=%.3f)",
             resid.max_residual, chart.min_output_separation,
             100.0 * worst_slope_dev, T));
}

// ---- criterion 9: leaf projection bound -------------------------------------

void criterion_9() {
  const SlabSystem sys = make_preset("bump");
  const SemiconjugacyEvaluator eval(sys, 1e-8, 32);
  CheckOptions opts;
  opts.seed = 20260810;
  const CheckReport r = check_cs_projection_bound(eval, opts);
  const bool pass = r.passed() && std::isfinite(r.margin);
  report(9, pass,
         fmt("cs-leaf projection bound: sup=%.4f, stable under doubling and "
             "2x extension (%ld violations)",
             r.margin, r.violations));
}

// ---- criterion 10: full verification suite ----------------------------------

void criterion_10() {
  Timer timer;
  bool pass = true;
  std::string detail = "verify --all:";
  for (const char* name : {"product", "bump", "sink", "cu-boundary"}) {
    const SlabSystem sys = make_preset(name);
    SuiteOptions opts;
    opts.checks.n_samples = 100;
    opts.checks.seed = 20260810;
    opts.checks.stable_leaf_length = 12.0;
    opts.cert_n1 = 64;
    opts.cert_n2 = 64;
    opts.cert_ns = 16;
    const SuiteResult suite = run_verification_suite(sys, name, opts);
    long viol = 0;
    for (const auto& r : suite.reports) {
      if (!r.passed()) ++viol;
    }
    pass = pass && suite.all_passed;
    detail += fmt(" %s:%s", name, suite.all_passed ? "ok" : "FAIL");
    if (viol > 0) {
      for (const auto& r : suite.reports) {
        if (!r.passed()) {
          detail += fmt(" [%s@%s: %s]", r.check_id.c_str(), r.target.c_str(),
                        r.worst_witness.c_str());
          break;
        }
      }
    }
  }
  const double elapsed = timer.seconds();
  pass = pass && elapsed <= 300.0;
  report(10, pass, detail + fmt(" (%.0fs <= 300s)", elapsed));
}

}  // namespace

int main() {
  Timer total;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("acceptance: %s (%d failed, %.0fs total)\n",
              g_failures == 0 ? "PASS" : "FAIL", g_failures, total.seconds());
  return g_failures == 0 ? 0 : 1;
}
