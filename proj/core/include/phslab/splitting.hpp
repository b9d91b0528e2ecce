#ifndef PHSLAB_SPLITTING_HPP
#define PHSLAB_SPLITTING_HPP

#include "phslab/systems.hpp"
#include "phslab/torus.hpp"

namespace phslab {

struct SplittingOptions {
  int max_iter = 140;        // depth budget for the cocycle iteration
  double tol = 1e-8;         // Cauchy tolerance on the unit directions
  double theta_min = 1e-3;   // transversality floor for plane intersections
  int stability_pad = 5;     // extra steps the Cauchy test must survive
};

// Unit bundle data at one point, computed by forward/backward iteration of
// the derivative cocycle (directions) and of its inverse transpose (plane
// normals). e_c is the intersection of the cs and cu planes.
struct SplittingSample {
  SlabPoint point;
  Vec3 e_s = Vec3::Zero();
  Vec3 e_c = Vec3::Zero();
  Vec3 e_u = Vec3::Zero();
  Vec3 n_cs = Vec3::Zero();
  Vec3 n_cu = Vec3::Zero();
  int iterations_used = 0;
  double residual = 0.0;
};

// Individual bundle queries. n_iter is the depth budget (must be >= 1);
// throws ConvergenceError when the Cauchy test is not met within it.
Vec3 unstable_direction(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                        double tol);
Vec3 stable_direction(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                      double tol);
Vec3 cs_plane_normal(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                     double tol);
Vec3 cu_plane_normal(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                     double tol);
Vec3 center_direction(const SlabSystem& sys, const SlabPoint& x, int n_iter,
                      double tol, double theta_min = 1e-3);

// All bundles at once with shared orbits; cheaper than five separate calls.
SplittingSample splitting_sample(const SlabSystem& sys, const SlabPoint& x,
                                 const SplittingOptions& opts = {});

// Residual of Df-invariance between a sample and the sample at the image
// point (0 for an exactly invariant field).
double transport_residual(const SlabSystem& sys, const SplittingSample& at_x,
                          const SplittingSample& at_fx);

// 2D boundary dynamics: center is the forward-dominant direction, stable the
// backward-dominant one.
Vec2 center_direction_2d(const SurfaceSystem& sys, const PlanePoint& v,
                         int n_iter, double tol);
Vec2 stable_direction_2d(const SurfaceSystem& sys, const PlanePoint& v,
                         int n_iter, double tol);

}  // namespace phslab

#endif
