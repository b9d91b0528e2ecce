#include "phslab/splitting.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "phslab/errors.hpp"
#include "phslab/parallel.hpp"

namespace phslab {

namespace {

// Fixed generic seeds; a degenerate choice is detected by image norm and the
// next seed is used instead.
const std::array<Vec3, 3> kSeeds3 = {
    Vec3(0.5310, 0.2940, 0.7950).normalized(),
    Vec3(-0.2100, 0.8300, 0.5100).normalized(),
    Vec3(0.7400, -0.5000, 0.4500).normalized(),
};
const std::array<Vec2, 2> kSeeds2 = {
    Vec2(0.6247, 0.7809),
    Vec2(-0.4472, 0.8944),
};

template <typename Mat, typename Vec>
Vec apply_best_seed(const Mat& acc, const auto& seeds) {
  Vec best = Vec::Zero();
  double best_norm = -1.0;
  for (const auto& seed : seeds) {
    Vec img = acc * seed;
    const double n = img.norm();
    if (n > best_norm) {
      best_norm = n;
      best = img;
    }
  }
  return best;
}

// Incremental power iteration on a matrix product accumulated on the right.
// next() must return the factor for the next depth.
template <typename Mat, typename Vec, typename NextFactor, typename Seeds>
Vec iterate_cocycle(NextFactor&& next, const Seeds& seeds, int max_iter,
                    double tol, int stability_pad, int* iterations_out,
                    double* residual_out, const char* label) {
  if (max_iter < 1) throw PreconditionError("iteration budget must be >= 1");
  Mat acc = Mat::Identity();
  Vec dir = Vec::Zero();
  double residual = std::numeric_limits<double>::infinity();
  int converged_streak = 0;
  for (int k = 1; k <= max_iter; ++k) {
    acc = acc * next(k);
    acc /= acc.norm();
    Vec img = apply_best_seed<Mat, Vec>(acc, seeds);
    const double n = img.norm();
    if (!(n > 1e-300)) throw ConvergenceError(std::string(label) + ": collapsed image");
    img /= n;
    if (k > 1) {
      if (img.dot(dir) < 0.0) img = -img;
      residual = (img - dir).norm();
      if (residual < tol / 10.0) {
        if (++converged_streak >= stability_pad) {
          dir = img;
          if (iterations_out) *iterations_out = k;
          if (residual_out) *residual_out = residual;
          return dir;
        }
      } else {
        converged_streak = 0;
      }
    }
    dir = img;
  }
  throw ConvergenceError(std::string(label) +
                         ": cocycle iteration did not meet the Cauchy test");
}

struct OrbitCache {
  const SlabSystem* sys;
  SlabPoint x;
  std::vector<SlabPoint> backward;  // backward[k] = f^{-(k+1)}(x)
  std::vector<SlabPoint> forward;   // forward[k]  = f^{k}(x), k >= 0

  const SlabPoint& back(int k) {  // k >= 1
    while (static_cast<int>(backward.size()) < k) {
      const SlabPoint& last = backward.empty() ? x : backward.back();
      backward.push_back(sys->inverse(last));
    }
    return backward[k - 1];
  }
  const SlabPoint& fwd(int k) {  // k >= 0
    if (forward.empty()) forward.push_back(x);
    while (static_cast<int>(forward.size()) <= k) {
      forward.push_back(sys->forward(forward.back()));
    }
    return forward[k];
  }
};

Vec3 orient_by(const Vec3& v, const Vec2& plane_ref, bool prefer_vertical) {
  if (prefer_vertical && std::abs(v.z()) > 1e-9) {
    return v.z() > 0.0 ? v : -v;
  }
  const double d = v.x() * plane_ref.x() + v.y() * plane_ref.y();
  if (std::abs(d) > 1e-9) return d > 0.0 ? v : -v;
  return v.z() >= 0.0 ? v : -v;
}

}  // namespace

Vec3 unstable_direction(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                        double tol) {
  OrbitCache orbit{&sys, x, {}, {}};
  Vec3 d = iterate_cocycle<Mat3, Vec3>(
      [&](int k) { return sys.derivative(orbit.back(k)); }, kSeeds3, n_iter,
      tol, 5, nullptr, nullptr, "unstable direction");
  return orient_by(d, sys.base_linear().e_u(), false);
}

Vec3 stable_direction(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                      double tol) {
  OrbitCache orbit{&sys, x, {}, {}};
  Vec3 d = iterate_cocycle<Mat3, Vec3>(
      [&](int k) { return sys.derivative(orbit.fwd(k - 1)).inverse().eval(); },
      kSeeds3, n_iter, tol, 5, nullptr, nullptr, "stable direction");
  return orient_by(d, sys.base_linear().e_s(), false);
}

Vec3 cs_plane_normal(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                     double tol) {
  OrbitCache orbit{&sys, x, {}, {}};
  Vec3 d = iterate_cocycle<Mat3, Vec3>(
      [&](int k) { return sys.derivative(orbit.fwd(k - 1)).transpose().eval(); },
      kSeeds3, n_iter, tol, 5, nullptr, nullptr, "cs plane");
  return orient_by(d, sys.base_linear().pi_u_vector(), true);
}

Vec3 cu_plane_normal(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                     double tol) {
  OrbitCache orbit{&sys, x, {}, {}};
  Vec3 d = iterate_cocycle<Mat3, Vec3>(
      [&](int k) {
        return sys.derivative(orbit.back(k)).inverse().transpose().eval();
      },
      kSeeds3, n_iter, tol, 5, nullptr, nullptr, "cu plane");
  return orient_by(d, sys.base_linear().pi_s_vector(), true);
}

Vec3 center_direction(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                      double tol, double theta_min) {
  const Vec3 ncs = cs_plane_normal(sys, x, n_iter, tol);
  const Vec3 ncu = cu_plane_normal(sys, x, n_iter, tol);
  Vec3 c = ncs.cross(ncu);
  const double n = c.norm();
  if (n < theta_min) {
    throw DegenerateSplittingError("cs and cu planes nearly tangent");
  }
  c /= n;
  return orient_by(c, sys.base_linear().e_u(), true);
}

SplittingSample splitting_sample(const SlabSystem& sys, const SlabPoint& x,
                                 const SplittingOptions& opts) {
  OrbitCache orbit{&sys, x, {}, {}};

  struct Channel {
    Mat3 acc = Mat3::Identity();
    Vec3 dir = Vec3::Zero();
    bool done = false;
    int streak = 0;
    double residual = std::numeric_limits<double>::infinity();
  };
  Channel u, s, cs, cu;

  auto advance = [&](Channel& ch, const Mat3& factor, double tol,
                     int pad) {
    if (ch.done) return;
    ch.acc = ch.acc * factor;
    ch.acc /= ch.acc.norm();
    Vec3 img = apply_best_seed<Mat3, Vec3>(ch.acc, kSeeds3);
    const double n = img.norm();
    if (!(n > 1e-300)) throw ConvergenceError("splitting: collapsed image");
    img /= n;
    if (ch.dir.squaredNorm() > 0.0) {
      if (img.dot(ch.dir) < 0.0) img = -img;
      ch.residual = (img - ch.dir).norm();
      if (ch.residual < tol / 10.0) {
        if (++ch.streak >= pad) ch.done = true;
      } else {
        ch.streak = 0;
      }
    }
    ch.dir = img;
  };

  int used = 0;
  for (int k = 1; k <= opts.max_iter; ++k) {
    used = k;
    if (!u.done || !cu.done) {
      const SlabPoint& pb = orbit.back(k);
      const Mat3 df = sys.derivative(pb);
      advance(u, df, opts.tol, opts.stability_pad);
      advance(cu, df.inverse().transpose().eval(), opts.tol,
              opts.stability_pad);
    }
    if (!s.done || !cs.done) {
      const SlabPoint& pf = orbit.fwd(k - 1);
      const Mat3 df = sys.derivative(pf);
      advance(s, df.inverse().eval(), opts.tol, opts.stability_pad);
      advance(cs, df.transpose().eval(), opts.tol, opts.stability_pad);
    }
    if (u.done && s.done && cs.done && cu.done) break;
  }
  if (!(u.done && s.done && cs.done && cu.done)) {
    throw ConvergenceError("splitting did not converge within the budget");
  }

  SplittingSample out;
  out.point = x;
  out.e_u = orient_by(u.dir, sys.base_linear().e_u(), false);
  out.e_s = orient_by(s.dir, sys.base_linear().e_s(), false);
  out.n_cs = orient_by(cs.dir, sys.base_linear().pi_u_vector(), true);
  out.n_cu = orient_by(cu.dir, sys.base_linear().pi_s_vector(), true);
  Vec3 c = out.n_cs.cross(out.n_cu);
  const double n = c.norm();
  if (n < opts.theta_min) {
    throw DegenerateSplittingError("cs and cu planes nearly tangent");
  }
  out.e_c = orient_by(c / n, sys.base_linear().e_u(), true);
  out.iterations_used = used;
  out.residual = std::max(std::max(u.residual, s.residual),
                          std::max(cs.residual, cu.residual));
  return out;
}

double transport_residual(const SlabSystem& sys, const SplittingSample& at_x,
                          const SplittingSample& at_fx) {
  const Mat3 df = sys.derivative(at_x.point);
  double worst = 0.0;
  const std::array<const Vec3*, 3> here = {&at_x.e_s, &at_x.e_c, &at_x.e_u};
  const std::array<const Vec3*, 3> there = {&at_fx.e_s, &at_fx.e_c, &at_fx.e_u};
  for (int i = 0; i < 3; ++i) {
    Vec3 pushed = (df * (*here[i])).normalized();
    const double r =
        std::min((pushed - *there[i]).norm(), (pushed + *there[i]).norm());
    worst = std::max(worst, r);
  }
  return worst;
}

Vec2 center_direction_2d(const SurfaceSystem& sys, const PlanePoint& v,
                         int n_iter, double tol) {
  std::vector<PlanePoint> backward;
  auto back = [&](int k) -> const PlanePoint& {
    while (static_cast<int>(backward.size()) < k) {
      const PlanePoint& last = backward.empty() ? v : backward.back();
      backward.push_back(sys.inverse(last));
    }
    return backward[k - 1];
  };
  Vec2 d = iterate_cocycle<Mat2, Vec2>(
      [&](int k) { return sys.derivative(back(k)); }, kSeeds2, n_iter, tol, 5,
      nullptr, nullptr, "2d center direction");
  const Vec2 ref = sys.linear_model().e_u();
  if (d.dot(ref) < 0.0) d = -d;
  return d;
}

Vec2 stable_direction_2d(const SurfaceSystem& sys, const PlanePoint& v,
                         int n_iter, double tol) {
  std::vector<PlanePoint> forward{v};
  auto fwd = [&](int k) -> const PlanePoint& {
    while (static_cast<int>(forward.size()) <= k) {
      forward.push_back(sys.forward(forward.back()));
    }
    return forward[k];
  };
  Vec2 d = iterate_cocycle<Mat2, Vec2>(
      [&](int k) { return sys.derivative(fwd(k - 1)).inverse().eval(); },
      kSeeds2, n_iter, tol, 5, nullptr, nullptr, "2d stable direction");
  const Vec2 ref = sys.linear_model().e_s();
  if (d.dot(ref) < 0.0) d = -d;
  return d;
}

PartialHyperbolicityCertificate verify_partial_hyperbolicity(
    const SlabSystem& sys, int n1, int n2, int ns,
    const SplittingOptions& opts, unsigned threads) {
  if (n1 < 2 || n2 < 2 || ns < 2) {
    throw PreconditionError("certificate grid must be at least 2x2x2");
  }
  const long total = static_cast<long>(n1) * n2 * ns;
  struct Rates {
    double rs, rc, ru;
    bool ok;
  };
  std::vector<Rates> rates(static_cast<std::size_t>(total));

  parallel_for(static_cast<std::size_t>(total), threads, [&](std::size_t idx) {
    const long k = static_cast<long>(idx);
    const int i = static_cast<int>(k % n1);
    const int j = static_cast<int>((k / n1) % n2);
    const int m = static_cast<int>(k / (static_cast<long>(n1) * n2));
    SlabPoint p{PlanePoint(static_cast<double>(i) / n1,
                           static_cast<double>(j) / n2),
                static_cast<double>(m) / (ns - 1)};
    Rates r{0.0, 0.0, 0.0, false};
    SplittingSample sample = splitting_sample(sys, p, opts);
    const Mat3 df = sys.derivative(p);
    r.rs = (df * sample.e_s).norm();
    r.rc = (df * sample.e_c).norm();
    r.ru = (df * sample.e_u).norm();
    r.ok = true;
    rates[idx] = r;
  });

  PartialHyperbolicityCertificate cert;
  cert.grid_points = total;
  double g1 = std::numeric_limits<double>::infinity();
  double g2 = g1, g3 = g1, g4 = g1;
  long worst_idx = 0;
  double worst_gap = std::numeric_limits<double>::infinity();
  for (long k = 0; k < total; ++k) {
    const Rates& r = rates[static_cast<std::size_t>(k)];
    const double c_over_s = r.rc / r.rs;
    const double u_over_c = r.ru / r.rc;
    const double inv_rs = 1.0 / r.rs;
    g1 = std::min(g1, c_over_s);
    g2 = std::min(g2, u_over_c);
    g3 = std::min(g3, r.ru);
    g4 = std::min(g4, inv_rs);
    const double local =
        std::min(std::min(c_over_s, u_over_c), std::min(r.ru, inv_rs));
    if (local < worst_gap) {
      worst_gap = local;
      worst_idx = k;
    }
  }
  cert.gap_center_over_stable = g1;
  cert.gap_unstable_over_center = g2;
  cert.min_unstable_expansion = g3;
  cert.min_stable_contraction = g4;
  cert.pass = g1 > 1.0 && g2 > 1.0 && g3 > 1.0 && g4 > 1.0;
  {
    const int i = static_cast<int>(worst_idx % n1);
    const int j = static_cast<int>((worst_idx / n1) % n2);
    const int m = static_cast<int>(worst_idx / (static_cast<long>(n1) * n2));
    cert.worst_point = SlabPoint{PlanePoint(static_cast<double>(i) / n1,
                                            static_cast<double>(j) / n2),
                                 static_cast<double>(m) / (ns - 1)};
  }
  return cert;
}

DominatedSplittingCertificate verify_weak_domination(
    const SurfaceSystem& sys, int n1, int n2, const SplittingOptions& opts,
    unsigned threads) {
  if (n1 < 2 || n2 < 2) {
    throw PreconditionError("certificate grid must be at least 2x2");
  }
  const long total = static_cast<long>(n1) * n2;
  struct Rates {
    double rs, rc;
  };
  std::vector<Rates> rates(static_cast<std::size_t>(total));
  parallel_for(static_cast<std::size_t>(total), threads, [&](std::size_t idx) {
    const long k = static_cast<long>(idx);
    const int i = static_cast<int>(k % n1);
    const int j = static_cast<int>(k / n1);
    PlanePoint v(static_cast<double>(i) / n1, static_cast<double>(j) / n2);
    const Vec2 ec = center_direction_2d(sys, v, opts.max_iter, opts.tol);
    const Vec2 es = stable_direction_2d(sys, v, opts.max_iter, opts.tol);
    const Mat2 dg = sys.derivative(v);
    rates[idx] = {(dg * es).norm(), (dg * ec).norm()};
  });
  DominatedSplittingCertificate cert;
  cert.grid_points = total;
  double g1 = std::numeric_limits<double>::infinity();
  double g2 = g1;
  for (const auto& r : rates) {
    g1 = std::min(g1, r.rc / r.rs);
    g2 = std::min(g2, 1.0 / r.rs);
  }
  cert.gap_center_over_stable = g1;
  cert.min_stable_contraction = g2;
  cert.pass = g1 > 1.0 && g2 > 1.0;
  return cert;
}

}  // namespace phslab
