#ifndef PHSLAB_RAGGED_HPP
#define PHSLAB_RAGGED_HPP

#include <utility>
#include <vector>

#include "phslab/semiconjugacy.hpp"

namespace phslab {

// Boundary-distance coordinate averaged along semiconjugacy fibers with
// half-window T (in units of center arclength). Restricted to one fiber the
// average is affine with slope 1/(2T) once T covers the fiber.
class HeightField {
 public:
  HeightField(const SemiconjugacyEvaluator& eval, double T,
              const FiberOptions& fopts = {});

  // Distance ratio to the boundary faces in slab coordinates; constant
  // continuation outside [0,1].
  static double p0(double s) { return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s); }

  // Window average of p0 along a fiber at arclength position t, with the
  // constant tails beyond the endpoints.
  double average(const FiberSegment& fib, double t) const;

  // Average along the fiber through x, at x's own arclength position.
  double average_p(const SlabPoint& x) const;

  double T() const { return T_; }
  const SemiconjugacyEvaluator& evaluator() const { return *eval_; }
  const FiberOptions& fiber_options() const { return fopts_; }

 private:
  const SemiconjugacyEvaluator* eval_;
  double T_;
  FiberOptions fopts_;
};

struct ChartGrid {
  int n1 = 16, n2 = 16, ns = 16;
  PlanePoint origin{0.0, 0.0};  // cell offset, for translation checks
};

struct ChartEntry {
  SlabPoint input;
  PlanePoint h_plane;  // H(input)
  double p = 0.0;      // averaged height
};

struct RaggedChart {
  std::vector<ChartEntry> entries;
  ChartGrid grid;
  double T = 0.0;
  double min_output_separation = 0.0;
  std::pair<long, long> closest_pair{-1, -1};
};

// Evaluates h = H x p on the grid and verifies pairwise injectivity of the
// outputs; throws InjectivityError with the witness pair on collision.
RaggedChart build_chart(const SemiconjugacyEvaluator& eval,
                        const HeightField& height, const ChartGrid& grid,
                        unsigned threads = 0);

struct ConjugacyResidualReport {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<long> histogram;   // decades 1e-16..1e0
  long samples = 0;
  // Empirical transverse coordinate of the conjugated map on a subsample:
  // (plane output, input height p, height of the image point).
  std::vector<std::array<double, 4>> phi_samples;
};

ConjugacyResidualReport conjugacy_residual(const SemiconjugacyEvaluator& eval,
                                           const HeightField& height,
                                           const RaggedChart& chart,
                                           int phi_subsample = 0,
                                           unsigned threads = 0);

struct RaggedProfile {
  std::vector<double> t;          // transect parameter in [0,1]
  std::vector<PlanePoint> v;      // transect points
  std::vector<double> arclength;  // fiber arclengths
  std::vector<double> p_lo, p_hi; // averaged height at the two fiber ends
  std::vector<long> jumps;        // indices i with |L_i - L_{i-1}| above
                                  // 10x the median adjacent difference
  double median_step = 0.0;
  double max_step = 0.0;
};

RaggedProfile ragged_profile(const SemiconjugacyEvaluator& eval,
                             const HeightField& height, const PlanePoint& from,
                             const PlanePoint& to, int n,
                             unsigned threads = 0);

}  // namespace phslab

#endif
