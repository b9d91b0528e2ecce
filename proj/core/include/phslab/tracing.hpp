#ifndef PHSLAB_TRACING_HPP
#define PHSLAB_TRACING_HPP

#include <functional>
#include <vector>

#include "phslab/splitting.hpp"
#include "phslab/systems.hpp"
#include "phslab/torus.hpp"

namespace phslab {

enum class Bundle { Stable, Center, Unstable };

std::string to_string(Bundle b);

struct TraceOptions {
  double step = 1e-2;
  double max_length = 2.0;
  bool stop_at_boundary = true;
  double dir_tol = 1e-6;     // bundle-direction tolerance
  int dir_max_iter = 140;
  double max_turn = 1e-2;    // chord angle budget against the field, radians
  int max_vertices = 400000;
};

// Arclength-ordered polyline obtained by 4th-order integration of an
// oriented unit bundle field.
struct TracedCurve {
  std::vector<SlabPoint> vertices;
  std::vector<double> arclengths;  // cumulative from vertices[0]
  Bundle bundle = Bundle::Center;
  double step = 0.0;
  int seed_index = 0;          // position of the starting point
  double max_tangent_angle = 0.0;
  bool hit_boundary[2] = {false, false};  // per trace direction end

  double length() const { return arclengths.empty() ? 0.0 : arclengths.back(); }
};

struct TracedCurve2 {
  std::vector<PlanePoint> vertices;
  std::vector<double> arclengths;
  Bundle bundle = Bundle::Center;
  double step = 0.0;
  int seed_index = 0;
  double max_tangent_angle = 0.0;

  double length() const { return arclengths.empty() ? 0.0 : arclengths.back(); }
};

// One-directional trace from x0 along the oriented bundle field; sign picks
// the initial orientation against the deterministic bundle orientation.
TracedCurve trace_curve(const SlabSystem& sys, const SlabPoint& x0,
                        Bundle bundle, const TraceOptions& opts = {},
                        double sign = +1.0);

// Leaf through x0: both directions concatenated, each of length
// opts.max_length, with x0 at seed_index.
TracedCurve trace_leaf(const SlabSystem& sys, const SlabPoint& x0,
                       Bundle bundle, const TraceOptions& opts = {});

TracedCurve2 trace_curve_2d(const SurfaceSystem& sys, const PlanePoint& x0,
                            Bundle bundle, const TraceOptions& opts = {},
                            double sign = +1.0);

// 2D center / stable leaves of the boundary dynamics through x0 (both
// directions, x0 at seed_index).
TracedCurve2 center_leaf_2d(const SurfaceSystem& sys, const PlanePoint& x0,
                            const TraceOptions& opts = {});
TracedCurve2 stable_leaf_2d(const SurfaceSystem& sys, const PlanePoint& x0,
                            const TraceOptions& opts = {});

// Unique transversal crossing of a center and a stable curve in one face.
// Throws NoIntersectionError / MultipleIntersectionsError.
PlanePoint intersect_center_stable(const SurfaceSystem& sys,
                                   const TracedCurve2& center,
                                   const TracedCurve2& stable);

// Count of transversal crossings between two polylines (tests and checks).
int count_polyline_crossings(const TracedCurve2& a, const TracedCurve2& b,
                             double dedupe_distance);

// Center base curve swept by stable (cs) or unstable (cu) rails.
struct TracedSurface {
  TracedCurve base;
  std::vector<TracedCurve> rails;
  Bundle rail_bundle = Bundle::Stable;
  double max_plane_angle = 0.0;  // rail chords against the sampled plane
};

TracedSurface trace_surface(const SlabSystem& sys, const SlabPoint& x0,
                            bool cs_pair, double c_len, double rail_len,
                            int n_rails, const TraceOptions& opts = {});

// Image of a polyline under f^n, vertex by vertex.
std::vector<SlabPoint> map_polyline(const SlabSystem& sys,
                                    const std::vector<SlabPoint>& polyline,
                                    int n);

// The raw integrator on an arbitrary unit direction field (orientation is
// propagated by sign matching); the bundle tracers are built on it and its
// convergence order is tested against manufactured smooth fields.
TracedCurve2 trace_unit_field_2d(
    const std::function<Vec2(const PlanePoint&)>& field, const PlanePoint& x0,
    const TraceOptions& opts);

}  // namespace phslab

#endif
