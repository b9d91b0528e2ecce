#ifndef PHSLAB_SEMICONJUGACY_HPP
#define PHSLAB_SEMICONJUGACY_HPP

#include <vector>

#include "phslab/systems.hpp"
#include "phslab/torus.hpp"

namespace phslab {

// Sup-norm of the plane displacement of f from its linear model over a grid,
// amplified by the geometric-series factor of each projection. total bounds
// ||H(p) - v|| for p = (v, s).
struct DriftBound {
  double sup_u = 0.0, sup_s = 0.0;
  double series_u = 0.0, series_s = 0.0;
  double total = 0.0;
};

DriftBound drift_bound(const SlabSystem& sys, int grid_n);

// Pointwise evaluation of the unique equivariant semiconjugacy H with
// H o f = A o H through the limits
//   H^u(p) = lim lambda_u^{-n} pi^u(f^n p),
//   H^s(p) = lim lambda_s^{+n} pi^s(f^{-n} p).
// Iteration depths are fixed from the drift bound so the truncation error is
// below tol/4; results are stable under depth increases within tol.
class SemiconjugacyEvaluator {
 public:
  explicit SemiconjugacyEvaluator(const SlabSystem& sys, double tol = 1e-8,
                                  int drift_grid = 32);

  double eval_Hu(const SlabPoint& p) const { return eval_Hu_depth(p, depth_u_); }
  double eval_Hs(const SlabPoint& p) const { return eval_Hs_depth(p, depth_s_); }
  PlanePoint eval_H(const SlabPoint& p) const;

  double eval_Hu_depth(const SlabPoint& p, int depth) const;
  double eval_Hs_depth(const SlabPoint& p, int depth) const;

  const SlabSystem& system() const { return sys_; }
  const DriftBound& drift() const { return drift_; }
  double tol() const { return tol_; }
  int depth_u() const { return depth_u_; }
  int depth_s() const { return depth_s_; }

 private:
  SlabSystem sys_;
  double tol_;
  DriftBound drift_;
  int depth_u_ = 2;
  int depth_s_ = 2;
};

// 2D mirror for a boundary restriction g with linear model B = A or A^{-1}:
// H^u(v) = lim lu^{-n} pi^u(g^n v), H^s(v) = lim ls^{+n} pi^s(g^{-n} v).
class SurfaceSemiconjugacy {
 public:
  explicit SurfaceSemiconjugacy(const SurfaceSystem& sys, double tol = 1e-8,
                                int drift_grid = 32);

  double eval_Hu(const PlanePoint& v) const { return eval_Hu_depth(v, depth_u_); }
  double eval_Hs(const PlanePoint& v) const { return eval_Hs_depth(v, depth_s_); }
  PlanePoint eval_H(const PlanePoint& v) const;

  double eval_Hu_depth(const PlanePoint& v, int depth) const;
  double eval_Hs_depth(const PlanePoint& v, int depth) const;

  const SurfaceSystem& system() const { return sys_; }
  double tol() const { return tol_; }
  int depth_u() const { return depth_u_; }
  int depth_s() const { return depth_s_; }

 private:
  SurfaceSystem sys_;
  double tol_;
  double sup_u_ = 0.0, sup_s_ = 0.0;
  int depth_u_ = 2;
  int depth_s_ = 2;
};

struct FiberOptions {
  double step = 1e-2;          // predictor arclength step
  double fiber_tol = 1e-6;     // corrector residual bound on ||H - v||
  double tangent_tol = 1e-3;   // chord angle budget against e_c (radians)
  double max_arclength = 8.0;  // runaway guard
  double ec_tol = 1e-6;        // center-direction tolerance
  int ec_max_iter = 140;
  int max_vertices = 6000;
};

// Pre-image H^{-1}(v): an arclength-ordered polyline tangent to e_c with
// endpoints on the two boundary faces.
struct FiberSegment {
  PlanePoint v{0.0, 0.0};
  std::vector<SlabPoint> vertices;  // ordered from the s=0 end to the s=1 end
  std::vector<double> arclengths;   // cumulative, same length as vertices
  int endpoint_faces[2] = {-1, -1};
  int seed_index = 0;               // vertex the growth started from
  double max_residual = 0.0;        // max ||H(vertex) - v||
  double max_tangent_angle = 0.0;   // max chord angle to e_c, radians
  bool degenerate = false;

  double arclength() const {
    return arclengths.empty() ? 0.0 : arclengths.back();
  }
};

FiberSegment fiber(const SemiconjugacyEvaluator& eval, const PlanePoint& v,
                   const FiberOptions& opts = {});

// Grow the fiber of H(seed) through the given interior point; the seed
// becomes a vertex.
FiberSegment fiber_through(const SemiconjugacyEvaluator& eval,
                           const SlabPoint& seed,
                           const FiberOptions& opts = {});

// 1.25 x the maximal fiber arclength over an n x n grid of one fundamental
// cell; by equivariance one cell suffices.
double fiber_length_bound(const SemiconjugacyEvaluator& eval, int grid_n,
                          const FiberOptions& opts = {}, unsigned threads = 0);

}  // namespace phslab

#endif
