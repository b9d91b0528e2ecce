// Command-line front end: system construction, semiconjugacy grids, fiber
// and curve export, the verification suite, and the ragged-profile figure.
//
// Exit codes: 0 success, 2 configuration errors, 3 numeric failures,
// 4 verification-check failures.

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "phslab/checks.hpp"
#include "phslab/config.hpp"
#include "phslab/errors.hpp"
#include "phslab/output.hpp"
#include "phslab/parallel.hpp"
#include "phslab/ragged.hpp"
#include "phslab/semiconjugacy.hpp"
#include "phslab/splitting.hpp"
#include "phslab/tracing.hpp"

namespace {

using namespace phslab;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitChecks = 4;

struct CliState {
  RunConfig cfg;
  std::string config_file;
  std::vector<std::string> overrides;  // key=value pairs
};

void finalize_config(CliState& st) {
  if (!st.config_file.empty()) {
    RunConfig from_file = load_config_file(st.config_file);
    // Command-line overrides win over the file.
    st.cfg = from_file;
  }
  for (const auto& kv : st.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override must be key=value: " + kv);
    }
    apply_override(st.cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  validate(st.cfg);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

double resolve_height_window(const RunConfig& cfg,
                             const SemiconjugacyEvaluator& eval) {
  if (cfg.height_T > 0.0) return cfg.height_T;
  return fiber_length_bound(eval, cfg.fiber_grid, fiber_options(cfg),
                            cfg.threads);
}

int cmd_build(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  const SlabSystem sys = make_system(cfg);
  const auto& lin = sys.linear_model();
  std::printf("preset %s: matrix [[%lld,%lld],[%lld,%lld]]\n",
              cfg.preset.c_str(), static_cast<long long>(lin.a()),
              static_cast<long long>(lin.b()), static_cast<long long>(lin.c()),
              static_cast<long long>(lin.d()));
  std::printf("lambda_u = %.12f, lambda_s = %.12f\n", lin.lambda_u(),
              lin.lambda_s());
  std::printf("e_u = (%.9f, %.9f), e_s = (%.9f, %.9f)\n", lin.e_u().x(),
              lin.e_u().y(), lin.e_s().x(), lin.e_s().y());

  SplittingOptions sopts;
  sopts.tol = 1e-7;
  const auto cert = verify_partial_hyperbolicity(
      sys, cfg.cert_n1, cfg.cert_n2, cfg.cert_ns, sopts, cfg.threads);
  std::printf(
      "certificate (%dx%dx%d): %s\n  |Df v^c|/|Df v^s| >= %.4f\n"
      "  |Df v^u|/|Df v^c| >= %.4f\n  |Df v^u| >= %.4f\n  1/|Df v^s| >= %.4f\n",
      cfg.cert_n1, cfg.cert_n2, cfg.cert_ns, cert.pass ? "pass" : "FAIL",
      cert.gap_center_over_stable, cert.gap_unstable_over_center,
      cert.min_unstable_expansion, cert.min_stable_contraction);

  if (cfg.preset == "sink") {
    const SurfaceSystem face = sys.restrict_to_boundary(0);
    const Mat2 jac = face.derivative(PlanePoint(0.0, 0.0));
    Eigen::EigenSolver<Mat2> es(jac);
    std::printf("weakened fixed point on face 0: eigenvalue moduli %.9f, %.9f\n",
                std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[1]));
  }

  write_text_file(out_path(cfg, "build.json"),
                  certificate_json(cert, config_json(cfg)));
  if (!cert.pass) throw EpsilonTooLargeError("certificate failed");
  return 0;
}

int cmd_semiconj(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  const SlabSystem sys = make_system(cfg);
  const SemiconjugacyEvaluator eval(sys, cfg.tol, cfg.drift_grid);
  std::printf("drift bound C = %.6g (depths %d forward / %d backward)\n",
              eval.drift().total, eval.depth_u(), eval.depth_s());

  const int n = 24, ns = 9;
  std::vector<GridRow> rows(static_cast<std::size_t>(n) * n * ns);
  parallel_for(rows.size(), cfg.threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx % n);
    const int j = static_cast<int>((idx / n) % n);
    const int k = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
    SlabPoint p{PlanePoint(static_cast<double>(i) / n,
                           static_cast<double>(j) / n),
                static_cast<double>(k) / (ns - 1)};
    rows[idx] = GridRow{p, eval.eval_H(p)};
  });
  write_text_file(out_path(cfg, "semiconj_grid.csv"),
                  csv_grid(rows, config_json(cfg)));

  // Functional-equation and identity-distance summary over the grid.
  double max_resid = 0.0, max_dist = 0.0;
  for (const auto& r : rows) {
    max_resid = std::max(
        max_resid, (eval.eval_H(sys.forward(r.input)) -
                    sys.linear_model().apply(r.value)).norm());
    max_dist = std::max(max_dist, (r.value - r.input.v).norm());
  }
  std::printf("max |H(f p) - A H(p)| = %.3e over %zu grid points\n", max_resid,
              rows.size());
  std::printf("max |H(p) - v| = %.3e\n", max_dist);
  return 0;
}

int cmd_fiber(const CliState& st, double vx, double vy) {
  const RunConfig& cfg = st.cfg;
  const SlabSystem sys = make_system(cfg);
  const SemiconjugacyEvaluator eval(sys, cfg.tol, cfg.drift_grid);
  const FiberSegment fib = fiber(eval, PlanePoint(vx, vy), fiber_options(cfg));
  std::printf(
      "fiber of (%.6g, %.6g): arclength %.9f, faces (%d, %d), residual %.3e\n",
      vx, vy, fib.arclength(), fib.endpoint_faces[0], fib.endpoint_faces[1],
      fib.max_residual);
  write_text_file(out_path(cfg, "fiber.csv"),
                  csv_polyline(fib.v, fib.vertices, config_json(cfg)));
  write_text_file(out_path(cfg, "fiber.json"),
                  fiber_json(fib, config_json(cfg)));
  return 0;
}

int cmd_trace(const CliState& st, const std::string& bundle_name, double x,
              double y, double s, double length, int face) {
  const RunConfig& cfg = st.cfg;
  const SlabSystem sys = make_system(cfg);
  Bundle bundle;
  if (bundle_name == "s") bundle = Bundle::Stable;
  else if (bundle_name == "c") bundle = Bundle::Center;
  else if (bundle_name == "u") bundle = Bundle::Unstable;
  else throw ConfigError("bundle must be one of s, c, u");

  TraceOptions topts;
  topts.step = cfg.fiber_step;
  topts.max_length = 0.5 * length;

  if (face >= 0) {
    const SurfaceSystem s2 = sys.restrict_to_boundary(face);
    const TracedCurve2 curve =
        bundle == Bundle::Stable ? stable_leaf_2d(s2, PlanePoint(x, y), topts)
                                 : center_leaf_2d(s2, PlanePoint(x, y), topts);
    std::printf("face %d %s-leaf: length %.6f, %zu vertices\n", face,
                bundle_name.c_str(), curve.length(), curve.vertices.size());
    write_text_file(out_path(cfg, "trace.csv"),
                    csv_polyline_2d(PlanePoint(x, y), curve.vertices,
                                    face == 0 ? 0.0 : 1.0, config_json(cfg)));
    return 0;
  }

  const TracedCurve curve = trace_leaf(sys, SlabPoint{{x, y}, s}, bundle, topts);
  std::printf("%s-curve: length %.6f, %zu vertices, max angle %.2e rad\n",
              bundle_name.c_str(), curve.length(), curve.vertices.size(),
              curve.max_tangent_angle);
  write_text_file(out_path(cfg, "trace.csv"),
                  csv_polyline(PlanePoint(x, y), curve.vertices,
                               config_json(cfg)));
  write_text_file(out_path(cfg, "trace.json"),
                  curve_json(curve, config_json(cfg)));
  return 0;
}

int cmd_verify(const CliState& st, bool all, const std::string& checks_csv,
               bool no_duals) {
  const RunConfig& cfg = st.cfg;
  const SlabSystem sys = make_system(cfg);

  SuiteOptions sopts;
  sopts.tol = cfg.tol;
  sopts.checks.n_samples = cfg.check_samples;
  sopts.checks.seed = cfg.seed;
  sopts.checks.threads = cfg.threads;
  sopts.include_fault_duals = !no_duals;
  sopts.cert_n1 = cfg.cert_n1;
  sopts.cert_n2 = cfg.cert_n2;
  sopts.cert_ns = cfg.cert_ns;

  SuiteResult suite = run_verification_suite(sys, cfg.preset, sopts);

  if (!all && !checks_csv.empty()) {
    std::vector<CheckReport> kept;
    for (const auto& r : suite.reports) {
      if (checks_csv.find(r.check_id) != std::string::npos) kept.push_back(r);
    }
    suite.reports = std::move(kept);
    suite.all_passed =
        !suite.certificate_ran || suite.certificate.pass;
    for (const auto& r : suite.reports) {
      if (!r.passed()) suite.all_passed = false;
    }
  }

  std::fputs(suite_table(suite).c_str(), stdout);
  write_text_file(out_path(cfg, "verify.json"),
                  suite_json(suite, config_json(cfg)));
  return suite.all_passed ? 0 : kExitChecks;
}

int cmd_figure(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  const SlabSystem sys = make_system(cfg);
  const SemiconjugacyEvaluator eval(sys, cfg.tol, cfg.drift_grid);
  const double T = resolve_height_window(cfg, eval);
  const HeightField height(eval, T, fiber_options(cfg));

  PlanePoint from, to;
  default_transect(cfg, sys.linear_model(), &from, &to);
  const RaggedProfile prof = ragged_profile(eval, height, from, to,
                                            cfg.transect_n, cfg.threads);
  std::printf("transect of %d fibers: median |dL| %.3e, max |dL| %.3e, "
              "%zu jump(s)\n",
              cfg.transect_n, prof.median_step, prof.max_step,
              prof.jumps.size());

  write_text_file(out_path(cfg, "figure.svg"),
                  profile_svg(prof, "fiber images over the transect (" +
                                        cfg.preset + ")"));
  write_text_file(out_path(cfg, "profile.json"),
                  profile_json(prof, config_json(cfg)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partially hyperbolic slab laboratory"};
  app.require_subcommand(1);

  CliState st;
  std::vector<std::string> pre_overrides;
  app.add_option("--config", st.config_file, "flat key=value config file");
  app.add_option("--set", pre_overrides,
                 "config override key=value (repeatable)");
  std::string preset_opt, matrix_csv, out_opt;
  double epsilon = 0.0, tol = 0.0;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  auto* o_preset = app.add_option("--preset", preset_opt,
                                  "product | bump | sink | cu-boundary");
  auto* o_matrix = app.add_option("--matrix", matrix_csv,
                                  "four integers a,b,c,d");
  auto* o_eps = app.add_option("--epsilon", epsilon, "perturbation amplitude");
  auto* o_threads =
      app.add_option("--threads", threads, "worker threads (0 = auto)");
  auto* o_seed = app.add_option("--seed", seed, "sampling seed");
  auto* o_out = app.add_option("--out", out_opt, "output directory");
  auto* o_tol = app.add_option("--tol", tol, "semiconjugacy tolerance");

  auto* build = app.add_subcommand("build", "construct and certify a system");
  auto* semiconj =
      app.add_subcommand("semiconj", "evaluate the semiconjugacy on a grid");
  auto* fiber_cmd = app.add_subcommand("fiber", "extract one fiber H^{-1}(v)");
  std::vector<double> at{0.5, 0.5};
  fiber_cmd->add_option("--at", at, "plane point v")->expected(2);
  auto* trace = app.add_subcommand("trace", "trace a bundle curve");
  std::string bundle = "c";
  std::vector<double> from{0.25, 0.25, 0.5};
  double length = 2.0;
  int face = -1;
  trace->add_option("--bundle", bundle, "s | c | u");
  trace->add_option("--from", from, "start point x y s")->expected(3);
  trace->add_option("--length", length, "total curve length");
  trace->add_option("--face", face, "trace on boundary face 0|1 (2D)");
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  bool all = false, no_duals = false;
  std::string checks_csv;
  verify->add_flag("--all", all, "run every check");
  verify->add_option("--checks", checks_csv, "comma-separated check ids");
  verify->add_flag("--no-duals", no_duals, "skip fault-injection duals");
  auto* figure = app.add_subcommand("figure", "render the ragged profile SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitConfig;
  }

  try {
    st.overrides = pre_overrides;
    if (o_preset->count()) st.overrides.push_back("preset=" + preset_opt);
    if (o_matrix->count()) st.overrides.push_back("matrix=" + matrix_csv);
    if (o_eps->count()) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "epsilon=%.17g", epsilon);
      st.overrides.push_back(buf);
    }
    if (o_threads->count()) {
      st.overrides.push_back("threads=" + std::to_string(threads));
    }
    if (o_seed->count()) st.overrides.push_back("seed=" + std::to_string(seed));
    if (o_out->count()) st.overrides.push_back("out_dir=" + out_opt);
    if (o_tol->count()) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "tol=%.17g", tol);
      st.overrides.push_back(buf);
    }
    finalize_config(st);

    if (build->parsed()) return cmd_build(st);
    if (semiconj->parsed()) return cmd_semiconj(st);
    if (fiber_cmd->parsed()) return cmd_fiber(st, at[0], at[1]);
    if (trace->parsed()) {
      return cmd_trace(st, bundle, from[0], from[1], from[2], length, face);
    }
    if (verify->parsed()) return cmd_verify(st, all, checks_csv, no_duals);
    if (figure->parsed()) return cmd_figure(st);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}
