#include "phslab/semiconjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "phslab/errors.hpp"
#include "phslab/parallel.hpp"
#include "phslab/splitting.hpp"

namespace phslab {

namespace {

int depth_for(double series, double rate_log, double tol) {
  // series * exp(-n * rate_log) <= tol/4
  if (series <= tol * 0.25) return 2;
  const double n = std::log(series / (0.25 * tol)) / rate_log;
  return std::clamp(static_cast<int>(std::ceil(n)) + 1, 2, 90);
}

}  // namespace

DriftBound drift_bound(const SlabSystem& sys, int grid_n) {
  if (grid_n < 16) throw PreconditionError("drift grid must be at least 16");
  const auto& lin = sys.linear_model();
  const int ns = std::max(9, grid_n / 2);
  DriftBound out;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      for (int k = 0; k < ns; ++k) {
        const SlabPoint p{PlanePoint(static_cast<double>(i) / grid_n,
                                     static_cast<double>(j) / grid_n),
                          static_cast<double>(k) / (ns - 1)};
        const PlanePoint delta = sys.forward(p).v - lin.apply(p.v);
        out.sup_u = std::max(out.sup_u, std::abs(lin.project_u(delta)));
        out.sup_s = std::max(out.sup_s, std::abs(lin.project_s(delta)));
      }
    }
  }
  const double lu = lin.lambda_u();
  const double ls = std::abs(lin.lambda_s());
  out.series_u = out.sup_u / (lu - 1.0);
  out.series_s = out.sup_s / (1.0 - ls);
  out.total = out.series_u * lin.e_u().norm() + out.series_s * lin.e_s().norm();
  return out;
}

SemiconjugacyEvaluator::SemiconjugacyEvaluator(const SlabSystem& sys,
                                               double tol, int drift_grid)
    : sys_(sys), tol_(tol) {
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  drift_ = drift_bound(sys_, drift_grid);
  const auto& lin = sys_.linear_model();
  depth_u_ = depth_for(drift_.series_u, std::log(lin.lambda_u()), tol_);
  depth_s_ = depth_for(drift_.series_s, -std::log(std::abs(lin.lambda_s())), tol_);
}

double SemiconjugacyEvaluator::eval_Hu_depth(const SlabPoint& p,
                                             int depth) const {
  SlabPoint q = p;
  for (int k = 0; k < depth; ++k) q = sys_.forward(q);
  return sys_.linear_model().project_u(q.v) *
         std::pow(sys_.linear_model().lambda_u(), -depth);
}

double SemiconjugacyEvaluator::eval_Hs_depth(const SlabPoint& p,
                                             int depth) const {
  SlabPoint q = p;
  for (int k = 0; k < depth; ++k) q = sys_.inverse(q);
  return sys_.linear_model().project_s(q.v) *
         std::pow(sys_.linear_model().lambda_s(), depth);
}

PlanePoint SemiconjugacyEvaluator::eval_H(const SlabPoint& p) const {
  return sys_.linear_model().from_projections(eval_Hu(p), eval_Hs(p));
}

SurfaceSemiconjugacy::SurfaceSemiconjugacy(const SurfaceSystem& sys, double tol,
                                           int drift_grid)
    : sys_(sys), tol_(tol) {
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (drift_grid < 16) throw PreconditionError("drift grid must be at least 16");
  const auto& lin = sys_.linear_model();
  for (int i = 0; i < drift_grid; ++i) {
    for (int j = 0; j < drift_grid; ++j) {
      const PlanePoint v(static_cast<double>(i) / drift_grid,
                         static_cast<double>(j) / drift_grid);
      const PlanePoint delta = sys_.forward(v) - lin.apply(v);
      sup_u_ = std::max(sup_u_, std::abs(lin.project_u(delta)));
      sup_s_ = std::max(sup_s_, std::abs(lin.project_s(delta)));
    }
  }
  const double lu = lin.lambda_u();
  const double ls = std::abs(lin.lambda_s());
  depth_u_ = depth_for(sup_u_ / (lu - 1.0), std::log(lu), tol_);
  depth_s_ = depth_for(sup_s_ / (1.0 - ls), -std::log(ls), tol_);
}

double SurfaceSemiconjugacy::eval_Hu_depth(const PlanePoint& v,
                                           int depth) const {
  PlanePoint q = v;
  for (int k = 0; k < depth; ++k) q = sys_.forward(q);
  return sys_.linear_model().project_u(q) *
         std::pow(sys_.linear_model().lambda_u(), -depth);
}

double SurfaceSemiconjugacy::eval_Hs_depth(const PlanePoint& v,
                                           int depth) const {
  PlanePoint q = v;
  for (int k = 0; k < depth; ++k) q = sys_.inverse(q);
  return sys_.linear_model().project_s(q) *
         std::pow(sys_.linear_model().lambda_s(), depth);
}

PlanePoint SurfaceSemiconjugacy::eval_H(const PlanePoint& v) const {
  return sys_.linear_model().from_projections(eval_Hu(v), eval_Hs(v));
}

namespace {

// Newton step on the plane offset at fixed s: solve H(p + delta) = v.
// Returns true when the residual bound was met.
bool plane_newton(const SemiconjugacyEvaluator& eval, SlabPoint& p,
                  const PlanePoint& v, double tol, int max_iter,
                  double max_move) {
  const double h = 1e-6;
  double moved = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const PlanePoint r = eval.eval_H(p) - v;
    if (r.norm() <= tol) return true;
    Mat2 jac;
    for (int c = 0; c < 2; ++c) {
      SlabPoint q = p;
      q.v[c] += h;
      jac.col(c) = (eval.eval_H(q) - v - r) / h;
    }
    PlanePoint delta = jac.partialPivLu().solve(r);
    double dn = delta.norm();
    if (dn > 0.5) {
      delta *= 0.5 / dn;
      dn = 0.5;
    }
    moved += dn;
    if (moved > max_move) return false;
    p.v -= delta;
  }
  return (eval.eval_H(p) - v).norm() <= tol;
}

// Damped least-squares correction in the plane spanned by two directions
// transverse to the center direction. H can be nearly flat along a fiber
// landing above a collapsed region, so a plain Newton solve is rank
// deficient there; the damping keeps the step defined and the best visited
// point is kept. Returns the best residual and leaves p at that point.
double transverse_newton(const SemiconjugacyEvaluator& eval, SlabPoint& p,
                         const PlanePoint& v, const Vec3& u1, const Vec3& u2,
                         double tol, int max_iter, double max_move,
                         double* sigma_min = nullptr) {
  const double h = 1e-6;
  auto shift = [&](const SlabPoint& q, double a, double b) {
    SlabPoint r = q;
    r.v.x() += a * u1.x() + b * u2.x();
    r.v.y() += a * u1.y() + b * u2.y();
    r.s += a * u1.z() + b * u2.z();
    r.s = std::clamp(r.s, 0.0, 1.0);
    return r;
  };
  double a = 0.0, b = 0.0;
  double best = std::numeric_limits<double>::infinity();
  double best_a = 0.0, best_b = 0.0;
  double mu = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const SlabPoint q = shift(p, a, b);
    const PlanePoint r = eval.eval_H(q) - v;
    const double rn = r.norm();
    if (rn < best) {
      best = rn;
      best_a = a;
      best_b = b;
    }
    if (rn <= tol) break;
    Mat2 jac;
    {
      const PlanePoint ra = eval.eval_H(shift(p, a + h, b)) - v;
      const PlanePoint rb = eval.eval_H(shift(p, a, b + h)) - v;
      jac.col(0) = (ra - r) / h;
      jac.col(1) = (rb - r) / h;
    }
    const Mat2 jtj = jac.transpose() * jac;
    if (it == 0) mu = 1e-8 * jtj.trace();
    if (sigma_min) {
      Eigen::SelfAdjointEigenSolver<Mat2> es(jtj);
      *sigma_min = std::sqrt(std::max(0.0, es.eigenvalues()[0]));
    }
    const Vec2 rhs = jac.transpose() * Vec2(r.x(), r.y());
    Vec2 delta = (jtj + mu * Mat2::Identity()).ldlt().solve(rhs);
    double dn = delta.norm();
    if (dn > 0.5 * max_move) delta *= 0.5 * max_move / dn;
    a -= delta.x();
    b -= delta.y();
    if (std::hypot(a, b) > max_move) {
      a = best_a;
      b = best_b;
      mu = std::max(mu * 10.0, 1e-6 * jtj.trace());
    }
  }
  p = shift(p, best_a, best_b);
  return best;
}

struct GrowResult {
  std::vector<SlabPoint> points;  // excludes the seed
  int face = -1;                  // boundary face reached, or -1
  double max_residual = 0.0;
  double max_angle = 0.0;
};

GrowResult grow_fiber(const SemiconjugacyEvaluator& eval, const SlabPoint& seed,
                      const PlanePoint& v, double sign,
                      const FiberOptions& opts) {
  GrowResult out;
  const SlabSystem& sys = eval.system();
  SlabPoint q = seed;
  Vec3 prev = Vec3::Zero();
  double step = opts.step;
  double arclen = 0.0;

  // Chord tangency is enforced on interior chords against the mean of the
  // center directions at the two chord ends. Inside the boundary collar the
  // center field turns into the face and no finite step tracks the
  // asymptotic tangency, so the tracer just marches and relies on the
  // residual-certified corrector.
  const double collar = 0.01;
  const double snap = 1e-7;

  Vec3 ec_here = Vec3::Zero();
  bool have_ec = false;

  while (static_cast<int>(out.points.size()) < opts.max_vertices) {
    Vec3 ec = have_ec ? ec_here
                      : center_direction(sys, q, opts.ec_max_iter, opts.ec_tol);
    if (prev.squaredNorm() > 0.0 && ec.dot(prev) < 0.0) ec = -ec;
    if (prev.squaredNorm() == 0.0 && sign < 0.0 && !have_ec) ec = -ec;

    // Predictor, clamped to the slab when it would cross a face.
    SlabPoint cand{q.v + step * ec.head<2>(), q.s + step * ec.z()};
    bool hit_face = false;
    int face = -1;
    if (cand.s < 0.0 || cand.s > 1.0) {
      const double target = cand.s < 0.0 ? 0.0 : 1.0;
      const double t = (target - q.s) / (step * ec.z());
      cand = SlabPoint{q.v + t * step * ec.head<2>(), target};
      hit_face = true;
      face = cand.s == 0.0 ? 0 : 1;
    } else if (cand.s < snap || cand.s > 1.0 - snap) {
      cand.s = cand.s < snap ? 0.0 : 1.0;
      hit_face = true;
      face = cand.s == 0.0 ? 0 : 1;
    }

    const bool in_collar = std::min(q.s, 1.0 - q.s) <= collar;
    bool ok;
    if (hit_face) {
      ok = plane_newton(eval, cand, v, opts.fiber_tol, 12, 4.0 * opts.step);
      // The landing point may sit where H is flat along the face; accept a
      // slightly looser residual there rather than walking away.
      if (!ok) {
        ok = (eval.eval_H(cand) - v).norm() <= 10.0 * opts.fiber_tol;
      }
    } else {
      Vec3 u1 = std::abs(ec.z()) < 0.9 ? ec.cross(Vec3::UnitZ()).normalized()
                                       : ec.cross(Vec3::UnitX()).normalized();
      Vec3 u2 = ec.cross(u1).normalized();
      double sigma_min = 1.0;
      const double resid = transverse_newton(eval, cand, v, u1, u2,
                                             opts.fiber_tol, 12,
                                             2.0 * opts.step, &sigma_min);
      ok = resid <= opts.fiber_tol;
      if (!ok && step <= 2.0 * opts.step / 100.0 &&
          (in_collar || sigma_min < 0.1)) {
        // H is allowed to be flat here (collapsed pre-images over a
        // weakened cell or above a face); keep the best point rather than
        // failing the trace.
        ok = resid <= 10.0 * opts.fiber_tol;
      }
    }

    if (!ok) {
      step *= 0.5;
      if (step < opts.step / 100.0) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "fiber corrector residual stayed above fiber_tol "
                      "(s=%.6f, residual=%.3e)",
                      q.s, (eval.eval_H(cand) - v).norm());
        throw ConvergenceError(msg);
      }
      continue;
    }

    const Vec3 chord(cand.v.x() - q.v.x(), cand.v.y() - q.v.y(), cand.s - q.s);
    const double cn = chord.norm();
    if (cn < 1e-14) {
      if (hit_face) {
        out.face = face;
        return out;
      }
      throw ConvergenceError("fiber tracer stalled");
    }
    const bool interior_chord =
        std::min(q.s, 1.0 - q.s) > collar &&
        std::min(cand.s, 1.0 - cand.s) > collar;
    Vec3 ec_next = Vec3::Zero();
    bool have_next = false;
    if (!hit_face) {
      ec_next = center_direction(sys, cand, opts.ec_max_iter, opts.ec_tol);
      if (ec_next.dot(chord) < 0.0) ec_next = -ec_next;
      have_next = true;
    }
    if (interior_chord && have_next) {
      Vec3 ec_fwd = ec.dot(chord) < 0.0 ? (-ec).eval() : ec;
      const Vec3 mean = (ec_fwd + ec_next).normalized();
      const double cosang = std::min(1.0, std::abs(chord.dot(mean)) / cn);
      const double angle = std::acos(cosang);
      if (angle > opts.tangent_tol && step > opts.step / 100.0) {
        step *= 0.5;
        continue;
      }
      out.max_angle = std::max(out.max_angle, angle);
    }
    out.max_residual =
        std::max(out.max_residual, (eval.eval_H(cand) - v).norm());

    arclen += cn;
    out.points.push_back(cand);
    prev = chord / cn;
    q = cand;
    ec_here = ec_next;
    have_ec = have_next;
    if (hit_face) {
      out.face = face;
      return out;
    }
    if (arclen > opts.max_arclength) {
      throw ConvergenceError("fiber exceeded the arclength guard");
    }
    step = std::min(opts.step, step * 2.0);
  }
  throw ConvergenceError("fiber exceeded the vertex budget");
}

FiberSegment assemble_fiber(const SemiconjugacyEvaluator& eval,
                            const SlabPoint& seed, const PlanePoint& v,
                            const FiberOptions& opts) {
  GrowResult down = grow_fiber(eval, seed, v, -1.0, opts);
  GrowResult up = grow_fiber(eval, seed, v, +1.0, opts);

  FiberSegment fib;
  fib.v = v;
  fib.vertices.reserve(down.points.size() + up.points.size() + 1);
  for (auto it = down.points.rbegin(); it != down.points.rend(); ++it) {
    fib.vertices.push_back(*it);
  }
  fib.seed_index = static_cast<int>(fib.vertices.size());
  fib.vertices.push_back(seed);
  for (const auto& p : up.points) fib.vertices.push_back(p);

  // Order from the s=0 end to the s=1 end.
  if (fib.vertices.front().s > fib.vertices.back().s) {
    std::reverse(fib.vertices.begin(), fib.vertices.end());
    fib.seed_index =
        static_cast<int>(fib.vertices.size()) - 1 - fib.seed_index;
    std::swap(down.face, up.face);
  }
  fib.endpoint_faces[0] = down.face;
  fib.endpoint_faces[1] = up.face;

  fib.arclengths.resize(fib.vertices.size());
  double acc = 0.0;
  fib.arclengths[0] = 0.0;
  for (std::size_t i = 1; i < fib.vertices.size(); ++i) {
    const auto& a = fib.vertices[i - 1];
    const auto& b = fib.vertices[i];
    acc += Vec3(b.v.x() - a.v.x(), b.v.y() - a.v.y(), b.s - a.s).norm();
    fib.arclengths[i] = acc;
  }
  fib.max_residual = std::max(down.max_residual, up.max_residual);
  fib.max_residual =
      std::max(fib.max_residual, (eval.eval_H(seed) - v).norm());
  fib.max_tangent_angle = std::max(down.max_angle, up.max_angle);
  fib.degenerate = acc < 10.0 * opts.fiber_tol;
  return fib;
}

}  // namespace

FiberSegment fiber(const SemiconjugacyEvaluator& eval, const PlanePoint& v,
                   const FiberOptions& opts) {
  if (!v.allFinite()) throw PreconditionError("fiber target must be finite");
  SlabPoint seed{v, 0.5};
  bool found = plane_newton(eval, seed, v, opts.fiber_tol * 0.5, 25, 2.0);
  if (!found) {
    // Coarse scan over plane offsets and a few transverse levels.
    const double reach = eval.drift().total + 0.2;
    double best = std::numeric_limits<double>::infinity();
    SlabPoint best_p = seed;
    for (double s : {0.5, 0.25, 0.75}) {
      for (int i = -6; i <= 6; ++i) {
        for (int j = -6; j <= 6; ++j) {
          SlabPoint p{v + PlanePoint(reach * i / 6.0, reach * j / 6.0), s};
          const double r = (eval.eval_H(p) - v).norm();
          if (r < best) {
            best = r;
            best_p = p;
          }
        }
      }
    }
    seed = best_p;
    found = plane_newton(eval, seed, v, opts.fiber_tol * 0.5, 30, 2.0);
    if (!found && (eval.eval_H(seed) - v).norm() > 10.0 * opts.fiber_tol) {
      throw SeedNotFoundError("no point with ||H - v|| within tolerance");
    }
  }
  return assemble_fiber(eval, seed, v, opts);
}

FiberSegment fiber_through(const SemiconjugacyEvaluator& eval,
                           const SlabPoint& seed, const FiberOptions& opts) {
  if (!(seed.s > 0.0 && seed.s < 1.0)) {
    throw PreconditionError("fiber seed must lie in the open slab");
  }
  const PlanePoint v = eval.eval_H(seed);
  return assemble_fiber(eval, seed, v, opts);
}

double fiber_length_bound(const SemiconjugacyEvaluator& eval, int grid_n,
                          const FiberOptions& opts, unsigned threads) {
  if (grid_n < 1) throw PreconditionError("grid must be positive");
  const std::size_t total = static_cast<std::size_t>(grid_n) * grid_n;
  std::vector<double> lengths(total, 0.0);
  parallel_for(total, threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx) % grid_n;
    const int j = static_cast<int>(idx) / grid_n;
    const PlanePoint v((i + 0.5) / grid_n, (j + 0.5) / grid_n);
    lengths[idx] = fiber(eval, v, opts).arclength();
  });
  double m = 0.0;
  for (double L : lengths) m = std::max(m, L);
  return 1.25 * m;
}

}  // namespace phslab
