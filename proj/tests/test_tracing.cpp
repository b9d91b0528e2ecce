#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "phslab/errors.hpp"
#include "phslab/semiconjugacy.hpp"
#include "phslab/tracing.hpp"

using namespace phslab;
using namespace phslab::testing;

TEST_SUITE_BEGIN("tracing");

TEST_CASE("product center trace is the vertical segment clipped to the slab") {
  TraceOptions opts;
  opts.max_length = 2.0;
  const TracedCurve c =
      trace_curve(product_system(), {{0.3, 0.4}, 0.5}, Bundle::Center, opts);
  CHECK(c.hit_boundary[1]);
  CHECK(std::abs(c.length() - 0.5) <= 1e-8);
  for (const auto& q : c.vertices) {
    CHECK((q.v - PlanePoint(0.3, 0.4)).norm() <= 1e-8);
  }
}

TEST_CASE("product unstable trace is a straight line with increasing H^u") {
  TraceOptions opts;
  opts.max_length = 1.0;
  const TracedCurve c =
      trace_curve(product_system(), {{0.0, 0.0}, 0.5}, Bundle::Unstable, opts);
  const auto& eval = product_evaluator();
  double prev = -1e9;
  for (const auto& q : c.vertices) {
    CHECK(std::abs(q.s - 0.5) <= 1e-8);
    const double hu = eval.eval_Hu(q);
    CHECK(hu > prev);
    prev = hu;
  }
  CHECK(c.max_tangent_angle <= 1e-7);
  // arclength increments match the step within 1%
  for (std::size_t i = 1; i < c.arclengths.size(); ++i) {
    const double inc = c.arclengths[i] - c.arclengths[i - 1];
    CHECK(inc == doctest::Approx(opts.step).epsilon(0.01));
  }
}

TEST_CASE("chords stay within the angle budget against the sampled field") {
  TraceOptions opts;
  opts.max_length = 1.5;
  const TracedCurve c =
      trace_leaf(bump_system(), {{0.25, 0.6}, 0.5}, Bundle::Center, opts);
  CHECK(c.max_tangent_angle <= opts.max_turn);
}

TEST_CASE("re-tracing at half step moves the endpoint very little") {
  // Richardson-style refinement oracle; the bundle direction tolerance is
  // tightened so the comparison isolates the integration error.
  TraceOptions opts;
  opts.max_length = 1.0;
  opts.stop_at_boundary = false;
  opts.dir_tol = 1e-9;
  const SlabPoint x0{{0.3, 0.15}, 0.4};
  const TracedCurve c1 =
      trace_curve(bump_system(), x0, Bundle::Unstable, opts);
  TraceOptions half = opts;
  half.step = opts.step / 2.0;
  const TracedCurve c2 =
      trace_curve(bump_system(), x0, Bundle::Unstable, half);
  // compare at matched arclength (endpoints differ by step quantization)
  auto at = [](const TracedCurve& c, double t) {
    std::size_t i = 0;
    while (i + 1 < c.arclengths.size() && c.arclengths[i + 1] < t) ++i;
    const double t0 = c.arclengths[i], t1 = c.arclengths[i + 1];
    const double w = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
    const SlabPoint& a = c.vertices[i];
    const SlabPoint& b = c.vertices[i + 1];
    return Vec3((1 - w) * a.v.x() + w * b.v.x(),
                (1 - w) * a.v.y() + w * b.v.y(), (1 - w) * a.s + w * b.s);
  };
  const Vec3 a = at(c1, 0.9);
  const Vec3 b = at(c2, 0.9);
  CHECK((a - b).norm() <= 1e-6 * opts.max_length);
}

TEST_CASE("step-halving endpoint convergence of the integrator is 4th order") {
  // Manufactured smooth field: the unit circle flow around (1, 1).
  const PlanePoint center(1.0, 1.0);
  auto field = [&](const PlanePoint& p) {
    const Vec2 r = p - center;
    return Vec2(-r.y(), r.x()).normalized();
  };
  const PlanePoint x0(2.0, 1.0);  // radius 1
  std::vector<double> steps = {4e-2, 2e-2, 1e-2, 5e-3};
  std::vector<double> errs;
  for (double h : steps) {
    TraceOptions opts;
    opts.step = h;
    opts.max_length = 1.5707963267948966;  // quarter turn
    opts.max_turn = 1.0;
    const TracedCurve2 c = trace_unit_field_2d(field, x0, opts);
    // after a quarter turn the trace sits near (1, 2); measure the radial
    // defect, which is immune to the endpoint's phase along the circle
    errs.push_back(std::abs((c.vertices.back() - center).norm() - 1.0));
  }
  double slope_sum = 0.0;
  int slopes = 0;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    if (errs[i] <= 1e-15 || errs[i - 1] <= 1e-15) continue;
    slope_sum += std::log(errs[i - 1] / errs[i]) / std::log(2.0);
    ++slopes;
  }
  REQUIRE(slopes > 0);
  CHECK(slope_sum / slopes >= 3.5);
}

TEST_CASE("a sharp turn below the step floor is rejected") {
  // circle of radius 1e-5: curvature forces the step under step/100
  const PlanePoint center(0.0, 0.0);
  auto field = [&](const PlanePoint& p) {
    const Vec2 r = p - center;
    return Vec2(-r.y(), r.x()).normalized();
  };
  TraceOptions opts;
  opts.step = 1e-2;
  opts.max_length = 1.0;
  CHECK_THROWS_AS(trace_unit_field_2d(field, PlanePoint(1e-5, 0.0), opts),
                  StepRejectedError);
}

TEST_CASE("2d center leaf of the linear restriction is the unstable line") {
  const SurfaceSystem g = product_system().restrict_to_boundary(0);
  TraceOptions opts;
  opts.max_length = 1.0;
  const PlanePoint x0(0.2, 0.1);
  const TracedCurve2 leaf = center_leaf_2d(g, x0, opts);
  const Vec2 e_u = cat_matrix().e_u();
  for (const auto& q : leaf.vertices) {
    const Vec2 d = q - x0;
    CHECK(std::abs(d.x() * e_u.y() - d.y() * e_u.x()) <= 1e-9);
  }
}

TEST_CASE("2d center leaves are lattice-equivariant") {
  const SurfaceSystem g = sink_system().restrict_to_boundary(0);
  TraceOptions opts;
  opts.max_length = 1.0;
  const PlanePoint x0(0.31, 0.12);
  const TracedCurve2 a = center_leaf_2d(g, x0, opts);
  const TracedCurve2 b =
      center_leaf_2d(g, x0 + PlanePoint(1.0, 0.0), opts);
  REQUIRE(a.vertices.size() == b.vertices.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    worst = std::max(worst,
                     (b.vertices[i] - a.vertices[i] - PlanePoint(1, 0)).norm());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("leaf through the weakened basin stays in the face trace") {
  const SurfaceSystem g = sink_system().restrict_to_boundary(0);
  TraceOptions opts;
  opts.max_length = 0.6;
  const TracedCurve2 leaf = center_leaf_2d(g, PlanePoint(0.02, 0.01), opts);
  CHECK(leaf.length() > 0.5);
  TraceOptions half = opts;
  half.step = opts.step / 2.0;
  const TracedCurve2 leaf2 = center_leaf_2d(g, PlanePoint(0.02, 0.01), half);
  CHECK((leaf.vertices.back() - leaf2.vertices.back()).norm() <= 1e-5);
}

TEST_CASE("intersect center and stable curves") {
  const SurfaceSystem g = product_system().restrict_to_boundary(0);
  TraceOptions opts;
  opts.max_length = 1.2;
  SUBCASE("linear oracle") {
    // For the linear restriction the crossing solves
    // x0 + t e_u = y0 + u e_s in closed form.
    const PlanePoint x0(0.0, 0.0), y0(0.3, 0.0);
    const TracedCurve2 c = center_leaf_2d(g, x0, opts);
    const TracedCurve2 s = stable_leaf_2d(g, y0, opts);
    const PlanePoint hit = intersect_center_stable(g, c, s);
    const Vec2 eu = cat_matrix().e_u(), es = cat_matrix().e_s();
    Mat2 m;
    m.col(0) = eu;
    m.col(1) = -es;
    const Vec2 tu = m.partialPivLu().solve(Vec2(y0 - x0));
    const PlanePoint expect = x0 + tu.x() * eu;
    CHECK((hit - expect).norm() <= 1e-6);
  }
  SUBCASE("parallel short segments do not intersect") {
    TraceOptions shorter;
    shorter.max_length = 0.05;
    const TracedCurve2 c = center_leaf_2d(g, PlanePoint(0.0, 0.0), shorter);
    const TracedCurve2 c2 = center_leaf_2d(g, PlanePoint(0.0, 0.5), shorter);
    CHECK_THROWS_AS(intersect_center_stable(g, c, c2), NoIntersectionError);
  }
  SUBCASE("sink face pairs cross exactly once") {
    const SurfaceSystem gs = sink_system().restrict_to_boundary(0);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int crossings_found = 0;
    for (int k = 0; k < 20; ++k) {
      const PlanePoint x(U(rng), U(rng));
      const PlanePoint y = x + PlanePoint(0.4 * (U(rng) - 0.5),
                                          0.4 * (U(rng) - 0.5));
      TraceOptions t;
      t.max_length = 2.0;
      const TracedCurve2 c = center_leaf_2d(gs, x, t);
      const TracedCurve2 s = stable_leaf_2d(gs, y, t);
      // exhaustive chord sweep is the oracle for "exactly one"
      CHECK(count_polyline_crossings(c, s, 0.5 * t.step) <= 1);
      try {
        intersect_center_stable(gs, c, s);
        ++crossings_found;
      } catch (const NoIntersectionError&) {
      }
    }
    CHECK(crossings_found >= 15);
  }
}

TEST_CASE("traced cs surface: rails share H^u and stay tangent to the plane") {
  const auto& eval = bump_evaluator();
  TraceOptions opts;
  const TracedSurface surf =
      trace_surface(bump_system(), {{0.45, 0.3}, 0.5}, true, 0.8, 0.4, 4, opts);
  CHECK(surf.max_plane_angle <= 1e-2);
  const double hu0 = eval.eval_Hu({{0.45, 0.3}, 0.5});
  for (const auto& rail : surf.rails) {
    for (std::size_t i = 0; i < rail.vertices.size(); i += 3) {
      CHECK(std::abs(eval.eval_Hu(rail.vertices[i]) - hu0) <= 1e-5);
    }
  }
}

TEST_CASE("unstable curve crosses a traced cs surface at most once") {
  const auto& sys = bump_system();
  const auto& eval = bump_evaluator();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(0.2, 0.8);
  for (int trial = 0; trial < 20; ++trial) {
    const SlabPoint base{{U(rng), U(rng)}, U(rng)};
    const double hu0 = eval.eval_Hu(base);
    TraceOptions t;
    t.max_length = 0.8;
    const TracedCurve u = trace_leaf(sys, {{U(rng), U(rng)}, U(rng)},
                                     Bundle::Unstable, t);
    // count sign changes of H^u - hu0 along the unstable curve
    int crossings = 0;
    double prev = eval.eval_Hu(u.vertices.front()) - hu0;
    for (std::size_t i = 1; i < u.vertices.size(); i += 2) {
      const double cur = eval.eval_Hu(u.vertices[i]) - hu0;
      if (prev * cur < 0.0) ++crossings;
      prev = cur;
    }
    CHECK(crossings <= 1);
  }
}

TEST_CASE("properly embedded center traces never self-approach") {
  TraceOptions opts;
  opts.max_length = 1.0;
  const TracedCurve c =
      trace_leaf(bump_system(), {{0.37, 0.41}, 0.5}, Bundle::Center, opts);
  for (std::size_t i = 0; i < c.vertices.size(); i += 4) {
    for (std::size_t j = i + 8; j < c.vertices.size(); j += 4) {
      const auto& a = c.vertices[i];
      const auto& b = c.vertices[j];
      const double d =
          Vec3(a.v.x() - b.v.x(), a.v.y() - b.v.y(), a.s - b.s).norm();
      const double along = c.arclengths[j] - c.arclengths[i];
      if (along > 4.0 * opts.step) CHECK(d > opts.step / 2.0);
    }
  }
}

TEST_SUITE_END();
