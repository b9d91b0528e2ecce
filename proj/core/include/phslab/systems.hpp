#ifndef PHSLAB_SYSTEMS_HPP
#define PHSLAB_SYSTEMS_HPP

#include <string>
#include <vector>

#include "phslab/torus.hpp"

namespace phslab {

enum class SystemVariant { Product, Bump, Sink, CuBoundary };

// Tangency type of an invariant boundary face. Product-type systems have
// faces tangent to the stable/unstable plane, which is neither of the two
// tagged cases of the perturbed families; they carry SuTangent.
enum class FaceTag { CsTangent, CuTangent, SuTangent };

std::string to_string(SystemVariant v);
std::string to_string(FaceTag t);

// Resolved numeric parameters of a slab map
//   f(v, s) = (A v + eps * eta(v, s), psi(s)).
// eta is Z^2-periodic in v; psi fixes s = 0 and s = 1.
struct SlabSystemParams {
  SystemVariant variant = SystemVariant::Product;
  double epsilon = 0.0;
  double kappa = 0.0;  // product-only transverse cubic strength

  // Transverse profile psi' = mid + (nu0-mid) D(s/w0) + (nu1-mid) D((1-s)/w1)
  // for the perturbed variants; mid is solved so that psi(1) = 1.
  double nu0 = 0.0, nu1 = 0.0;
  double w0 = 0.0, w1 = 0.0;
  double mid = 0.0;

  // Shear profile gains (eta components along e_u and e_s) and the
  // v-dependent modulation of the e_u shear.
  double shear_u = 0.0;
  double shear_s = 0.0;
  double plane_mod = 0.0;

  // Localized weakening of the e_u rate near lattice points on the s=0 face
  // (per unit epsilon).
  double da_unit = 0.0;
  double da_radius = 0.18;
  double da_depth = 0.25;

  int power = 1;  // expose f^power instead of f
};

class SurfaceSystem;

// A Z^2-equivariant diffeomorphism of R^2 x [0,1] with exact derivative and
// Newton inverse. Immutable after construction; all evaluation is pure.
class SlabSystem {
 public:
  SlabSystem(const ToralAutomorphism& linear, const SlabSystemParams& params);

  SlabPoint forward(const SlabPoint& p) const;
  SlabPoint inverse(const SlabPoint& p) const;
  Mat3 derivative(const SlabPoint& p) const;

  const ToralAutomorphism& linear_model() const { return linear_power_; }
  const ToralAutomorphism& base_linear() const { return linear_; }
  const SlabSystemParams& params() const { return params_; }

  FaceTag face_tag(int face) const;
  // 2D boundary dynamics on face 0 or 1. Faces tangent to the
  // center-unstable plane restrict the inverse map so the result always has
  // one-dimensional center and stable directions.
  SurfaceSystem restrict_to_boundary(int face) const;

  // Transverse interval diffeomorphism and plane perturbation; exposed for
  // tests and for the boundary restrictions.
  double psi(double s) const;
  double psi_prime(double s) const;
  double psi_inverse(double t) const;
  Vec2 eta(const PlanePoint& v, double s) const;
  Mat2 eta_dv(const PlanePoint& v, double s) const;
  Vec2 eta_ds(const PlanePoint& v, double s) const;

 private:
  SlabPoint forward_once(const SlabPoint& p) const;
  SlabPoint inverse_once(const SlabPoint& p) const;
  Mat3 derivative_once(const SlabPoint& p) const;

  ToralAutomorphism linear_;
  ToralAutomorphism linear_power_;
  SlabSystemParams params_;
};

// 2D restriction of a slab map to an invariant boundary face, presented as a
// weakly partially hyperbolic surface map (splitting E^c + E^s).
class SurfaceSystem {
 public:
  SurfaceSystem(const SlabSystem& parent, int face, bool inverted);

  PlanePoint forward(const PlanePoint& v) const;
  PlanePoint inverse(const PlanePoint& v) const;
  Mat2 derivative(const PlanePoint& v) const;

  const ToralAutomorphism& linear_model() const { return linear_; }
  int face() const { return face_; }
  bool inverted() const { return inverted_; }
  const SlabSystem& parent() const { return parent_; }

 private:
  SlabSystem parent_;
  ToralAutomorphism linear_;
  int face_ = 0;
  bool inverted_ = false;
  double s_face_ = 0.0;
};

// Trivial skew product f = A x psi_kappa with psi_kappa(s) = s + kappa
// s(1-s)(s-1/2); kappa = 0 gives f = A x id.
SlabSystem build_product(const ToralAutomorphism& a, double kappa = 0.0,
                         int power = 1);

// Negative / zero values select the per-variant tuned defaults.
struct PerturbedOptions {
  // Transverse profile.
  double nu0 = 0.0, nu1 = 0.0;
  double beta = 0.55;        // interior psi' plateau of the symmetric profile
  double w0 = 0.0, w1 = 0.0; // derived from (nu, beta) when left at 0

  double shear_u = -1.0;
  double shear_s = -1.0;     // only active in the cu-boundary variant
  double plane_mod = -1.0;

  double sink_mu = 0.87;     // target e_u rate at the weakened fixed point
  double da_radius = 0.18;
  double da_depth = 0.10;

  int power = 1;

  // Construction-time certificate (grid cone check); failure raises
  // EpsilonTooLarge.
  bool certify = true;
  int cert_n1 = 20, cert_n2 = 20, cert_ns = 9;
};

SlabSystem build_perturbed(const ToralAutomorphism& a, double epsilon,
                           SystemVariant variant,
                           const PerturbedOptions& opts = {});

// Pointwise cone certificate over a grid, evaluated with the numerically
// computed splitting: passes iff
//   min |Df v^c|/|Df v^s| > 1,  min |Df v^u|/|Df v^c| > 1,
//   min |Df v^u| > 1,           min 1/|Df v^s| > 1.
struct PartialHyperbolicityCertificate {
  double gap_center_over_stable = 0.0;
  double gap_unstable_over_center = 0.0;
  double min_unstable_expansion = 0.0;
  double min_stable_contraction = 0.0;  // min over grid of 1/|Df v^s|
  bool pass = false;
  long grid_points = 0;
  SlabPoint worst_point;  // argmin of the smallest gap
};

struct SplittingOptions;  // splitting.hpp

PartialHyperbolicityCertificate verify_partial_hyperbolicity(
    const SlabSystem& sys, int n1, int n2, int ns,
    const SplittingOptions& opts, unsigned threads = 0);

// Mirror certificate for a boundary restriction: min |Dg v^c|/|Dg v^s| and
// min 1/|Dg v^s| over a plane grid.
struct DominatedSplittingCertificate {
  double gap_center_over_stable = 0.0;
  double min_stable_contraction = 0.0;
  bool pass = false;
  long grid_points = 0;
};

DominatedSplittingCertificate verify_weak_domination(
    const SurfaceSystem& sys, int n1, int n2, const SplittingOptions& opts,
    unsigned threads = 0);

}  // namespace phslab

#endif
