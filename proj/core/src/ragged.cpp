#include "phslab/ragged.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "phslab/errors.hpp"
#include "phslab/parallel.hpp"
#include "phslab/tracing.hpp"

namespace phslab {

HeightField::HeightField(const SemiconjugacyEvaluator& eval, double T,
                         const FiberOptions& fopts)
    : eval_(&eval), T_(T), fopts_(fopts) {
  if (!(T > 0.0)) throw PreconditionError("averaging half-window must be positive");
}

double HeightField::average(const FiberSegment& fib, double t) const {
  if (fib.vertices.empty()) throw PreconditionError("empty fiber");
  const double L = fib.arclength();
  const double lo = t - T_;
  const double hi = t + T_;

  const double tail_lo = p0(fib.vertices.front().s);
  const double tail_hi = p0(fib.vertices.back().s);

  double integral = 0.0;
  if (lo < 0.0) integral += (std::min(hi, 0.0) - lo) * tail_lo;
  if (hi > L) integral += (hi - std::max(lo, L)) * tail_hi;

  const double a = std::max(lo, 0.0);
  const double b = std::min(hi, L);
  if (b > a) {
    // Composite trapezoid on the arclength partition, with linear
    // interpolation of s at the window edges.
    std::size_t i = 0;
    while (i + 1 < fib.arclengths.size() && fib.arclengths[i + 1] <= a) ++i;
    double t_prev = a;
    double s_prev;
    {
      const double t0 = fib.arclengths[i];
      const double t1 = fib.arclengths[i + 1];
      const double w = t1 > t0 ? (a - t0) / (t1 - t0) : 0.0;
      s_prev = (1.0 - w) * fib.vertices[i].s + w * fib.vertices[i + 1].s;
    }
    while (i + 1 < fib.arclengths.size() && fib.arclengths[i + 1] < b) {
      const double t_next = fib.arclengths[i + 1];
      const double s_next = fib.vertices[i + 1].s;
      integral += 0.5 * (p0(s_prev) + p0(s_next)) * (t_next - t_prev);
      t_prev = t_next;
      s_prev = s_next;
      ++i;
    }
    {
      const double t0 = fib.arclengths[i];
      const double t1 =
          i + 1 < fib.arclengths.size() ? fib.arclengths[i + 1] : t0;
      const double w = t1 > t0 ? (b - t0) / (t1 - t0) : 0.0;
      const double s_b =
          i + 1 < fib.vertices.size()
              ? (1.0 - w) * fib.vertices[i].s + w * fib.vertices[i + 1].s
              : fib.vertices[i].s;
      integral += 0.5 * (p0(s_prev) + p0(s_b)) * (b - t_prev);
    }
  }
  return integral / (2.0 * T_);
}

double HeightField::average_p(const SlabPoint& x) const {
  const FiberSegment fib = fiber_through(*eval_, x, fopts_);
  return average(fib, fib.arclengths[fib.seed_index]);
}

RaggedChart build_chart(const SemiconjugacyEvaluator& eval,
                        const HeightField& height, const ChartGrid& grid,
                        unsigned threads) {
  if (grid.n1 < 1 || grid.n2 < 1 || grid.ns < 1) {
    throw PreconditionError("chart grid must be positive");
  }
  RaggedChart chart;
  chart.grid = grid;
  chart.T = height.T();
  const long total = static_cast<long>(grid.n1) * grid.n2 * grid.ns;
  chart.entries.resize(static_cast<std::size_t>(total));

  parallel_for(static_cast<std::size_t>(total), threads, [&](std::size_t idx) {
    const long k = static_cast<long>(idx);
    const int i = static_cast<int>(k % grid.n1);
    const int j = static_cast<int>((k / grid.n1) % grid.n2);
    const int m = static_cast<int>(k / (static_cast<long>(grid.n1) * grid.n2));
    SlabPoint p{grid.origin + PlanePoint((i + 0.5) / grid.n1,
                                         (j + 0.5) / grid.n2),
                (m + 0.5) / grid.ns};
    const FiberSegment fib = fiber_through(eval, p, height.fiber_options());
    ChartEntry e;
    e.input = p;
    e.h_plane = fib.v;
    e.p = height.average(fib, fib.arclengths[fib.seed_index]);
    chart.entries[idx] = e;
  });

  // Pairwise injectivity via a sweep over the first output coordinate.
  std::vector<long> order(chart.entries.size());
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    return chart.entries[static_cast<std::size_t>(a)].h_plane.x() <
           chart.entries[static_cast<std::size_t>(b)].h_plane.x();
  });
  double best = std::numeric_limits<double>::infinity();
  std::pair<long, long> witness{-1, -1};
  for (std::size_t a = 0; a < order.size(); ++a) {
    const auto& ea = chart.entries[static_cast<std::size_t>(order[a])];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const auto& eb = chart.entries[static_cast<std::size_t>(order[b])];
      const double dx = eb.h_plane.x() - ea.h_plane.x();
      if (dx * dx >= best) break;
      const double d2 = dx * dx +
                        std::pow(eb.h_plane.y() - ea.h_plane.y(), 2) +
                        std::pow(eb.p - ea.p, 2);
      if (d2 < best) {
        best = d2;
        witness = {order[a], order[b]};
      }
    }
  }
  chart.min_output_separation = std::sqrt(best);
  chart.closest_pair = witness;
  if (!(chart.min_output_separation > 0.0)) {
    const auto& ea = chart.entries[static_cast<std::size_t>(witness.first)];
    throw InjectivityError("chart outputs collide near (" +
                           std::to_string(ea.h_plane.x()) + "," +
                           std::to_string(ea.h_plane.y()) + "," +
                           std::to_string(ea.p) + ")");
  }
  return chart;
}

namespace {

FiberSegment push_fiber(const SlabSystem& sys, const FiberSegment& fib,
                        const PlanePoint& image_v) {
  FiberSegment out;
  out.v = image_v;
  out.vertices = map_polyline(sys, fib.vertices, 1);
  out.arclengths.resize(out.vertices.size());
  out.arclengths[0] = 0.0;
  for (std::size_t i = 1; i < out.vertices.size(); ++i) {
    const auto& a = out.vertices[i - 1];
    const auto& b = out.vertices[i];
    out.arclengths[i] =
        out.arclengths[i - 1] +
        Vec3(b.v.x() - a.v.x(), b.v.y() - a.v.y(), b.s - a.s).norm();
  }
  out.endpoint_faces[0] = fib.endpoint_faces[0];
  out.endpoint_faces[1] = fib.endpoint_faces[1];
  out.seed_index = fib.seed_index;
  return out;
}

}  // namespace

ConjugacyResidualReport conjugacy_residual(const SemiconjugacyEvaluator& eval,
                                           const HeightField& height,
                                           const RaggedChart& chart,
                                           int phi_subsample,
                                           unsigned threads) {
  ConjugacyResidualReport rep;
  rep.samples = static_cast<long>(chart.entries.size());
  rep.histogram.assign(17, 0);
  const SlabSystem& sys = eval.system();
  const auto& lin = sys.linear_model();

  std::vector<double> residuals(chart.entries.size());
  parallel_for(chart.entries.size(), threads, [&](std::size_t i) {
    const auto& e = chart.entries[i];
    const PlanePoint lhs = eval.eval_H(sys.forward(e.input));
    const PlanePoint rhs = lin.apply(e.h_plane);
    residuals[i] = (lhs - rhs).norm();
  });
  double sum = 0.0;
  for (double r : residuals) {
    rep.max_residual = std::max(rep.max_residual, r);
    sum += r;
    int bin = r <= 0.0 ? 0
                       : static_cast<int>(std::floor(std::log10(r)) + 16.0);
    rep.histogram[static_cast<std::size_t>(std::clamp(bin, 0, 16))]++;
  }
  rep.mean_residual = rep.samples > 0 ? sum / rep.samples : 0.0;

  if (phi_subsample > 0) {
    const std::size_t stride =
        std::max<std::size_t>(1, chart.entries.size() / phi_subsample);
    for (std::size_t i = 0; i < chart.entries.size(); i += stride) {
      const auto& e = chart.entries[i];
      const FiberSegment fib =
          fiber_through(eval, e.input, height.fiber_options());
      const FiberSegment pushed = push_fiber(sys, fib, lin.apply(fib.v));
      const double phi =
          height.average(pushed, pushed.arclengths[pushed.seed_index]);
      rep.phi_samples.push_back({e.h_plane.x(), e.h_plane.y(), e.p, phi});
    }
  }
  return rep;
}

RaggedProfile ragged_profile(const SemiconjugacyEvaluator& eval,
                             const HeightField& height, const PlanePoint& from,
                             const PlanePoint& to, int n, unsigned threads) {
  if (n < 2) throw PreconditionError("transect needs at least two points");
  RaggedProfile prof;
  prof.t.resize(static_cast<std::size_t>(n));
  prof.v.resize(static_cast<std::size_t>(n));
  prof.arclength.resize(static_cast<std::size_t>(n));
  prof.p_lo.resize(static_cast<std::size_t>(n));
  prof.p_hi.resize(static_cast<std::size_t>(n));

  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    const double t = static_cast<double>(i) / (n - 1);
    const PlanePoint v = from + t * (to - from);
    const FiberSegment fib = fiber(eval, v, height.fiber_options());
    prof.t[i] = t;
    prof.v[i] = v;
    prof.arclength[i] = fib.arclength();
    prof.p_lo[i] = height.average(fib, 0.0);
    prof.p_hi[i] = height.average(fib, fib.arclength());
  });

  std::vector<double> diffs;
  diffs.reserve(prof.arclength.size());
  for (std::size_t i = 1; i < prof.arclength.size(); ++i) {
    diffs.push_back(std::abs(prof.arclength[i] - prof.arclength[i - 1]));
  }
  std::vector<double> sorted = diffs;
  std::sort(sorted.begin(), sorted.end());
  prof.median_step = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
  prof.max_step = sorted.empty() ? 0.0 : sorted.back();
  const double threshold = std::max(10.0 * prof.median_step, 1e-6);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > threshold) prof.jumps.push_back(static_cast<long>(i + 1));
  }
  return prof;
}

}  // namespace phslab
