#include "phslab/tracing.hpp"

#include <algorithm>
#include <cmath>

#include "phslab/errors.hpp"

namespace phslab {

std::string to_string(Bundle b) {
  switch (b) {
    case Bundle::Stable: return "s";
    case Bundle::Center: return "c";
    case Bundle::Unstable: return "u";
  }
  return "?";
}

namespace {

SlabPoint advance3(const SlabPoint& q, double h, const Vec3& d) {
  return SlabPoint{q.v + h * d.head<2>(), q.s + h * d.z()};
}
Vec3 delta3(const SlabPoint& a, const SlabPoint& b) {
  return Vec3(b.v.x() - a.v.x(), b.v.y() - a.v.y(), b.s - a.s);
}

Vec3 bundle_direction(const SlabSystem& sys, const SlabPoint& p, Bundle b,
                      const TraceOptions& opts) {
  switch (b) {
    case Bundle::Stable:
      return stable_direction(sys, p, opts.dir_max_iter, opts.dir_tol);
    case Bundle::Unstable:
      return unstable_direction(sys, p, opts.dir_max_iter, opts.dir_tol);
    case Bundle::Center:
      return center_direction(sys, p, opts.dir_max_iter, opts.dir_tol);
  }
  return Vec3::Zero();
}

struct Piece3 {
  std::vector<SlabPoint> points;
  double max_angle = 0.0;
  bool hit_boundary = false;
};

Piece3 trace_piece_3d(const SlabSystem& sys, const SlabPoint& x0,
                      Bundle bundle, const TraceOptions& opts, Vec3 dir0) {
  Piece3 out;
  SlabPoint q = x0;
  Vec3 prev = dir0;
  double step = opts.step;
  double arclen = 0.0;
  // As with the fiber tracer, the chord angle budget applies away from the
  // boundary collar; a curve turning tangentially into a face exceeds any
  // finite-step budget there.
  const double collar = 0.01;
  const double snap = 1e-9;
  auto field = [&](const SlabPoint& p, const Vec3& ref) {
    SlabPoint pc = p;
    pc.s = std::clamp(pc.s, 0.0, 1.0);
    Vec3 d = bundle_direction(sys, pc, bundle, opts);
    if (d.dot(ref) < 0.0) d = -d;
    return d;
  };
  while (static_cast<int>(out.points.size()) < opts.max_vertices) {
    const Vec3 k1 = field(q, prev);
    const Vec3 k2 = field(advance3(q, 0.5 * step, k1), k1);
    const Vec3 k3 = field(advance3(q, 0.5 * step, k2), k1);
    const Vec3 k4 = field(advance3(q, step, k3), k1);
    const Vec3 dir = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    SlabPoint cand = advance3(q, step, dir);

    bool boundary = false;
    if (cand.s < 0.0 || cand.s > 1.0) {
      const double target = cand.s < 0.0 ? 0.0 : 1.0;
      const double t = (target - q.s) / (cand.s - q.s);
      cand = SlabPoint{q.v + t * (cand.v - q.v), target};
      boundary = true;
    } else if (cand.s < snap || cand.s > 1.0 - snap) {
      cand.s = cand.s < snap ? 0.0 : 1.0;
      boundary = true;
    }

    const Vec3 chord = delta3(q, cand);
    const double cn = chord.norm();
    if (cn < 1e-15) {
      out.hit_boundary = boundary;
      return out;
    }
    const bool interior_chord = !boundary &&
                                std::min(q.s, 1.0 - q.s) > collar &&
                                std::min(cand.s, 1.0 - cand.s) > collar;
    if (interior_chord) {
      const double cosang = std::min(1.0, std::abs(chord.dot(k1)) / cn);
      const double angle = std::acos(cosang);
      if (angle > opts.max_turn) {
        step *= 0.5;
        if (step < opts.step / 100.0) {
          throw StepRejectedError("curve tracer step fell below step/100");
        }
        continue;
      }
      out.max_angle = std::max(out.max_angle, angle);
    }
    out.points.push_back(cand);
    arclen += cn;
    prev = chord / cn;
    q = cand;
    if (boundary && opts.stop_at_boundary) {
      out.hit_boundary = true;
      return out;
    }
    if (arclen >= opts.max_length) return out;
    step = std::min(opts.step, 2.0 * step);
  }
  return out;
}

struct Piece2 {
  std::vector<PlanePoint> points;
  double max_angle = 0.0;
};

Vec2 bundle_direction_2d(const SurfaceSystem& sys, const PlanePoint& p,
                         Bundle b, const TraceOptions& opts) {
  switch (b) {
    case Bundle::Stable:
      return stable_direction_2d(sys, p, opts.dir_max_iter, opts.dir_tol);
    case Bundle::Center:
      return center_direction_2d(sys, p, opts.dir_max_iter, opts.dir_tol);
    case Bundle::Unstable:
      break;
  }
  throw PreconditionError("2d boundary dynamics has center and stable bundles");
}

Piece2 trace_piece_2d(const SurfaceSystem& sys, const PlanePoint& x0,
                      Bundle bundle, const TraceOptions& opts, Vec2 dir0) {
  Piece2 out;
  PlanePoint q = x0;
  Vec2 prev = dir0;
  double step = opts.step;
  double arclen = 0.0;
  auto field = [&](const PlanePoint& p, const Vec2& ref) {
    Vec2 d = bundle_direction_2d(sys, p, bundle, opts);
    if (d.dot(ref) < 0.0) d = -d;
    return d;
  };
  while (static_cast<int>(out.points.size()) < opts.max_vertices) {
    const Vec2 k1 = field(q, prev);
    const Vec2 k2 = field(q + 0.5 * step * k1, k1);
    const Vec2 k3 = field(q + 0.5 * step * k2, k1);
    const Vec2 k4 = field(q + step * k3, k1);
    const Vec2 dir = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    const PlanePoint cand = q + step * dir;

    const Vec2 chord = cand - q;
    const double cn = chord.norm();
    if (cn < 1e-15) return out;
    const double cosang = std::min(1.0, std::abs(chord.dot(k1)) / cn);
    const double angle = std::acos(cosang);
    if (angle > opts.max_turn) {
      step *= 0.5;
      if (step < opts.step / 100.0) {
        throw StepRejectedError("curve tracer step fell below step/100");
      }
      continue;
    }
    out.max_angle = std::max(out.max_angle, angle);
    out.points.push_back(cand);
    arclen += cn;
    prev = chord / cn;
    q = cand;
    if (arclen >= opts.max_length) return out;
    step = std::min(opts.step, 2.0 * step);
  }
  return out;
}

template <typename Curve, typename Point>
void fill_arclengths(Curve& c) {
  c.arclengths.resize(c.vertices.size());
  if (c.vertices.empty()) return;
  c.arclengths[0] = 0.0;
  for (std::size_t i = 1; i < c.vertices.size(); ++i) {
    double d;
    if constexpr (std::is_same_v<Point, SlabPoint>) {
      d = delta3(c.vertices[i - 1], c.vertices[i]).norm();
    } else {
      d = (c.vertices[i] - c.vertices[i - 1]).norm();
    }
    c.arclengths[i] = c.arclengths[i - 1] + d;
  }
}

}  // namespace

TracedCurve trace_curve(const SlabSystem& sys, const SlabPoint& x0,
                        Bundle bundle, const TraceOptions& opts, double sign) {
  if (!(opts.step > 0.0)) throw PreconditionError("step must be positive");
  Vec3 d0 = sign * bundle_direction(sys, x0, bundle, opts);
  Piece3 piece = trace_piece_3d(sys, x0, bundle, opts, d0);
  TracedCurve out;
  out.bundle = bundle;
  out.step = opts.step;
  out.seed_index = 0;
  out.vertices.reserve(piece.points.size() + 1);
  out.vertices.push_back(x0);
  out.vertices.insert(out.vertices.end(), piece.points.begin(),
                      piece.points.end());
  out.max_tangent_angle = piece.max_angle;
  out.hit_boundary[1] = piece.hit_boundary;
  fill_arclengths<TracedCurve, SlabPoint>(out);
  return out;
}

TracedCurve trace_leaf(const SlabSystem& sys, const SlabPoint& x0,
                       Bundle bundle, const TraceOptions& opts) {
  Vec3 d0 = bundle_direction(sys, x0, bundle, opts);
  Piece3 neg = trace_piece_3d(sys, x0, bundle, opts, -d0);
  Piece3 pos = trace_piece_3d(sys, x0, bundle, opts, d0);
  TracedCurve out;
  out.bundle = bundle;
  out.step = opts.step;
  out.vertices.reserve(neg.points.size() + pos.points.size() + 1);
  for (auto it = neg.points.rbegin(); it != neg.points.rend(); ++it) {
    out.vertices.push_back(*it);
  }
  out.seed_index = static_cast<int>(out.vertices.size());
  out.vertices.push_back(x0);
  out.vertices.insert(out.vertices.end(), pos.points.begin(),
                      pos.points.end());
  out.max_tangent_angle = std::max(neg.max_angle, pos.max_angle);
  out.hit_boundary[0] = neg.hit_boundary;
  out.hit_boundary[1] = pos.hit_boundary;
  fill_arclengths<TracedCurve, SlabPoint>(out);
  return out;
}

TracedCurve2 trace_curve_2d(const SurfaceSystem& sys, const PlanePoint& x0,
                            Bundle bundle, const TraceOptions& opts,
                            double sign) {
  Vec2 d0 = sign * bundle_direction_2d(sys, x0, bundle, opts);
  Piece2 piece = trace_piece_2d(sys, x0, bundle, opts, d0);
  TracedCurve2 out;
  out.bundle = bundle;
  out.step = opts.step;
  out.seed_index = 0;
  out.vertices.push_back(x0);
  out.vertices.insert(out.vertices.end(), piece.points.begin(),
                      piece.points.end());
  out.max_tangent_angle = piece.max_angle;
  fill_arclengths<TracedCurve2, PlanePoint>(out);
  return out;
}

namespace {

TracedCurve2 leaf_2d(const SurfaceSystem& sys, const PlanePoint& x0,
                     Bundle bundle, const TraceOptions& opts) {
  Vec2 d0 = bundle_direction_2d(sys, x0, bundle, opts);
  Piece2 neg = trace_piece_2d(sys, x0, bundle, opts, -d0);
  Piece2 pos = trace_piece_2d(sys, x0, bundle, opts, d0);
  TracedCurve2 out;
  out.bundle = bundle;
  out.step = opts.step;
  for (auto it = neg.points.rbegin(); it != neg.points.rend(); ++it) {
    out.vertices.push_back(*it);
  }
  out.seed_index = static_cast<int>(out.vertices.size());
  out.vertices.push_back(x0);
  out.vertices.insert(out.vertices.end(), pos.points.begin(),
                      pos.points.end());
  out.max_tangent_angle = std::max(neg.max_angle, pos.max_angle);
  fill_arclengths<TracedCurve2, PlanePoint>(out);
  return out;
}

}  // namespace

TracedCurve2 center_leaf_2d(const SurfaceSystem& sys, const PlanePoint& x0,
                            const TraceOptions& opts) {
  return leaf_2d(sys, x0, Bundle::Center, opts);
}

TracedCurve2 stable_leaf_2d(const SurfaceSystem& sys, const PlanePoint& x0,
                            const TraceOptions& opts) {
  return leaf_2d(sys, x0, Bundle::Stable, opts);
}

namespace {

// Crossing parameter of segments [a0,a1] and [b0,b1]; returns true and the
// point when they intersect transversally.
bool segment_crossing(const PlanePoint& a0, const PlanePoint& a1,
                      const PlanePoint& b0, const PlanePoint& b1,
                      PlanePoint* out) {
  const Vec2 r = a1 - a0;
  const Vec2 s = b1 - b0;
  const double denom = r.x() * s.y() - r.y() * s.x();
  if (std::abs(denom) < 1e-14) return false;
  const Vec2 d = b0 - a0;
  const double t = (d.x() * s.y() - d.y() * s.x()) / denom;
  const double u = (d.x() * r.y() - d.y() * r.x()) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
  if (out) *out = a0 + t * r;
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> crossing_chords(
    const TracedCurve2& a, const TracedCurve2& b, double dedupe,
    std::vector<PlanePoint>* points) {
  std::vector<std::pair<std::size_t, std::size_t>> hits;
  for (std::size_t i = 0; i + 1 < a.vertices.size(); ++i) {
    for (std::size_t j = 0; j + 1 < b.vertices.size(); ++j) {
      PlanePoint p;
      if (segment_crossing(a.vertices[i], a.vertices[i + 1], b.vertices[j],
                           b.vertices[j + 1], &p)) {
        bool dup = false;
        if (points) {
          for (const auto& q : *points) {
            if ((q - p).norm() < dedupe) {
              dup = true;
              break;
            }
          }
        }
        if (!dup) {
          hits.emplace_back(i, j);
          if (points) points->push_back(p);
        }
      }
    }
  }
  return hits;
}

}  // namespace

int count_polyline_crossings(const TracedCurve2& a, const TracedCurve2& b,
                             double dedupe_distance) {
  std::vector<PlanePoint> pts;
  return static_cast<int>(crossing_chords(a, b, dedupe_distance, &pts).size());
}

PlanePoint intersect_center_stable(const SurfaceSystem& sys,
                                   const TracedCurve2& center,
                                   const TracedCurve2& stable) {
  if (center.vertices.size() < 2 || stable.vertices.size() < 2) {
    throw PreconditionError("curves must have at least one chord");
  }
  const double dedupe = 0.5 * std::max(center.step, stable.step);
  std::vector<PlanePoint> pts;
  auto hits = crossing_chords(center, stable, dedupe, &pts);
  if (hits.empty()) {
    throw NoIntersectionError("curves do not cross; extend and retry");
  }
  if (hits.size() > 1) {
    throw MultipleIntersectionsError(
        "curves cross more than once: first two near (" +
        std::to_string(pts[0].x()) + "," + std::to_string(pts[0].y()) +
        ") and (" + std::to_string(pts[1].x()) + "," +
        std::to_string(pts[1].y()) + ")");
  }

  // Refinement: re-trace both curves locally at a fine step around the
  // bracketing chords and intersect again.
  const auto [i, j] = hits[0];
  TraceOptions fine;
  fine.step = std::min(center.step, stable.step) / 20.0;
  fine.max_length = 3.0 * std::max(center.step, stable.step);
  TracedCurve2 c_loc = center_leaf_2d(sys, center.vertices[i], fine);
  TracedCurve2 s_loc = stable_leaf_2d(sys, stable.vertices[j], fine);
  std::vector<PlanePoint> fine_pts;
  auto fine_hits = crossing_chords(c_loc, s_loc, fine.step, &fine_pts);
  if (!fine_hits.empty()) return fine_pts[0];
  return pts[0];
}

TracedSurface trace_surface(const SlabSystem& sys, const SlabPoint& x0,
                            bool cs_pair, double c_len, double rail_len,
                            int n_rails, const TraceOptions& opts) {
  if (n_rails < 1) throw PreconditionError("surface needs at least one rail");
  TraceOptions copts = opts;
  copts.max_length = 0.5 * c_len;
  TracedSurface out;
  out.base = trace_leaf(sys, x0, Bundle::Center, copts);
  out.rail_bundle = cs_pair ? Bundle::Stable : Bundle::Unstable;

  TraceOptions ropts = opts;
  ropts.max_length = 0.5 * rail_len;

  const double total = out.base.length();
  for (int k = 0; k < n_rails; ++k) {
    const double target =
        total * (n_rails == 1 ? 0.5 : static_cast<double>(k) / (n_rails - 1));
    std::size_t idx = 0;
    while (idx + 1 < out.base.arclengths.size() &&
           out.base.arclengths[idx] < target) {
      ++idx;
    }
    const SlabPoint seed = out.base.vertices[idx];
    TracedCurve rail = trace_leaf(sys, seed, out.rail_bundle, ropts);

    // Tangency of rail chords to the sampled cs/cu plane.
    for (std::size_t m = 0; m + 1 < rail.vertices.size(); ++m) {
      const SlabPoint& a = rail.vertices[m];
      const SlabPoint& b = rail.vertices[m + 1];
      const Vec3 chord(b.v.x() - a.v.x(), b.v.y() - a.v.y(), b.s - a.s);
      const double cn = chord.norm();
      if (cn < 1e-14) continue;
      const Vec3 n = cs_pair
                         ? cs_plane_normal(sys, a, opts.dir_max_iter, opts.dir_tol)
                         : cu_plane_normal(sys, a, opts.dir_max_iter, opts.dir_tol);
      const double sinang = std::min(1.0, std::abs(chord.dot(n)) / cn);
      out.max_plane_angle = std::max(out.max_plane_angle, std::asin(sinang));
    }
    out.rails.push_back(std::move(rail));
  }
  return out;
}

std::vector<SlabPoint> map_polyline(const SlabSystem& sys,
                                    const std::vector<SlabPoint>& polyline,
                                    int n) {
  std::vector<SlabPoint> out = polyline;
  for (auto& p : out) {
    for (int k = 0; k < n; ++k) p = sys.forward(p);
  }
  return out;
}

TracedCurve2 trace_unit_field_2d(
    const std::function<Vec2(const PlanePoint&)>& field, const PlanePoint& x0,
    const TraceOptions& opts) {
  TracedCurve2 out;
  out.bundle = Bundle::Center;
  out.step = opts.step;
  out.vertices.push_back(x0);

  PlanePoint q = x0;
  Vec2 prev = field(x0).normalized();
  double step = opts.step;
  double arclen = 0.0;
  auto oriented = [&](const PlanePoint& p, const Vec2& ref) {
    Vec2 d = field(p).normalized();
    if (d.dot(ref) < 0.0) d = -d;
    return d;
  };
  while (static_cast<int>(out.vertices.size()) < opts.max_vertices) {
    const Vec2 k1 = oriented(q, prev);
    const Vec2 k2 = oriented(q + 0.5 * step * k1, k1);
    const Vec2 k3 = oriented(q + 0.5 * step * k2, k1);
    const Vec2 k4 = oriented(q + step * k3, k1);
    const Vec2 dir = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    const PlanePoint cand = q + step * dir;
    const Vec2 chord = cand - q;
    const double cn = chord.norm();
    if (cn < 1e-15) break;
    const double cosang = std::min(1.0, std::abs(chord.dot(k1)) / cn);
    const double angle = std::acos(cosang);
    if (angle > opts.max_turn) {
      step *= 0.5;
      if (step < opts.step / 100.0) {
        throw StepRejectedError("curve tracer step fell below step/100");
      }
      continue;
    }
    out.max_tangent_angle = std::max(out.max_tangent_angle, angle);
    out.vertices.push_back(cand);
    arclen += cn;
    prev = chord / cn;
    q = cand;
    if (arclen >= opts.max_length) break;
    step = std::min(opts.step, 2.0 * step);
  }
  fill_arclengths<TracedCurve2, PlanePoint>(out);
  return out;
}

}  // namespace phslab
