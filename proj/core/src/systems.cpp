#include "phslab/systems.hpp"

#include <cmath>

#include "phslab/errors.hpp"
#include "phslab/splitting.hpp"

namespace phslab {

namespace {

// C^2 smoothstep and its primitives; building block of the transverse
// profile and of the localized weakening bump.
double s5(double t) { return ((6.0 * t - 15.0) * t + 10.0) * t * t * t; }
double s5_prime(double t) {
  const double u = t * (1.0 - t);
  return 30.0 * u * u;
}

// Decay window D(t): 1 at t=0, 0 for t>=1, integral over [0,1] equal 1/2.
double window(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return 1.0 - s5(t);
}
double window_prime(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return -s5_prime(t);
}
// Primitive P(t) = integral of D over [0,t].
double window_primitive(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 0.5;
  const double t4 = t * t * t * t;
  return t - (((t - 3.0) * t + 2.5) * t4);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::string to_string(SystemVariant v) {
  switch (v) {
    case SystemVariant::Product: return "product";
    case SystemVariant::Bump: return "bump";
    case SystemVariant::Sink: return "sink";
    case SystemVariant::CuBoundary: return "cu-boundary";
  }
  return "?";
}

std::string to_string(FaceTag t) {
  switch (t) {
    case FaceTag::CsTangent: return "cs-tangent";
    case FaceTag::CuTangent: return "cu-tangent";
    case FaceTag::SuTangent: return "su-tangent";
  }
  return "?";
}

SlabSystem::SlabSystem(const ToralAutomorphism& linear,
                       const SlabSystemParams& params)
    : linear_(linear), linear_power_(linear), params_(params) {
  if (params_.power < 1) throw PreconditionError("power must be >= 1");
  if (params_.power > 1) {
    std::int64_t a = linear.a(), b = linear.b(), c = linear.c(), d = linear.d();
    std::int64_t ra = a, rb = b, rc = c, rd = d;
    for (int k = 1; k < params_.power; ++k) {
      const std::int64_t na = ra * a + rb * c;
      const std::int64_t nb = ra * b + rb * d;
      const std::int64_t nc = rc * a + rd * c;
      const std::int64_t nd = rc * b + rd * d;
      ra = na; rb = nb; rc = nc; rd = nd;
    }
    linear_power_ = ToralAutomorphism::from_matrix(ra, rb, rc, rd);
  }
}

double SlabSystem::psi(double s) const {
  if (s == 0.0) return 0.0;
  if (s == 1.0) return 1.0;
  const auto& p = params_;
  if (p.variant == SystemVariant::Product) {
    return s + p.kappa * ((-s + 1.5) * s - 0.5) * s;
  }
  const double left = (p.nu0 - p.mid) * p.w0 * window_primitive(s / p.w0);
  const double right =
      (p.nu1 - p.mid) * p.w1 * (0.5 - window_primitive((1.0 - s) / p.w1));
  return p.mid * s + left + right;
}

double SlabSystem::psi_prime(double s) const {
  const auto& p = params_;
  if (p.variant == SystemVariant::Product) {
    return 1.0 + p.kappa * ((-3.0 * s + 3.0) * s - 0.5);
  }
  return p.mid + (p.nu0 - p.mid) * window(s / p.w0) +
         (p.nu1 - p.mid) * window((1.0 - s) / p.w1);
}

double SlabSystem::psi_inverse(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  double s = t;
  for (int it = 0; it < 200; ++it) {
    const double f = psi(s) - t;
    if (std::abs(f) < 1e-15) return s;
    if (f > 0.0) hi = s; else lo = s;
    const double d = psi_prime(s);
    double next = s - f / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == s) return s;
    s = next;
  }
  return s;
}

namespace {

// Radial bump around the nearest lattice point: 1 at the lattice point,
// 0 outside radius r0.
double lattice_bump(const PlanePoint& v, double r0, PlanePoint* cell_offset) {
  PlanePoint u(v.x() - std::nearbyint(v.x()), v.y() - std::nearbyint(v.y()));
  if (cell_offset) *cell_offset = u;
  const double r = u.norm();
  return window(r / r0);
}

Vec2 lattice_bump_grad(const PlanePoint& u, double r0) {
  const double r = u.norm();
  if (r <= 0.0 || r >= r0) return Vec2::Zero();
  return (window_prime(r / r0) / (r0 * r)) * u;
}

}  // namespace

Vec2 SlabSystem::eta(const PlanePoint& v, double s) const {
  const auto& p = params_;
  if (p.variant == SystemVariant::Product) return Vec2::Zero();
  Vec2 out = Vec2::Zero();
  const double sh = std::sin(kTwoPi * s);
  if (p.shear_u != 0.0) {
    const double mod = 1.0 + p.plane_mod * std::cos(kTwoPi * (v.x() + v.y()));
    out += (p.shear_u * sh * mod) * linear_.e_u();
  }
  if (p.shear_s != 0.0) {
    out += (p.shear_s * sh) * linear_.e_s();
  }
  if (p.da_unit != 0.0) {
    const double depth = window(s / p.da_depth);
    if (depth > 0.0) {
      PlanePoint u;
      const double chi = lattice_bump(v, p.da_radius, &u);
      if (chi > 0.0) {
        out -= (p.da_unit * depth * chi * linear_.project_u(u)) * linear_.e_u();
      }
    }
  }
  return out;
}

Mat2 SlabSystem::eta_dv(const PlanePoint& v, double s) const {
  const auto& p = params_;
  Mat2 out = Mat2::Zero();
  if (p.variant == SystemVariant::Product) return out;
  const double sh = std::sin(kTwoPi * s);
  if (p.shear_u != 0.0 && p.plane_mod != 0.0) {
    const double dmod = -p.plane_mod * kTwoPi * std::sin(kTwoPi * (v.x() + v.y()));
    out += (p.shear_u * sh * dmod) * linear_.e_u() * Vec2(1.0, 1.0).transpose();
  }
  if (p.da_unit != 0.0) {
    const double depth = window(s / p.da_depth);
    if (depth > 0.0) {
      PlanePoint u;
      const double chi = lattice_bump(v, p.da_radius, &u);
      if (chi > 0.0) {
        const Vec2 grad = linear_.project_u(u) * lattice_bump_grad(u, p.da_radius) +
                          chi * linear_.pi_u_vector();
        out -= (p.da_unit * depth) * linear_.e_u() * grad.transpose();
      }
    }
  }
  return out;
}

Vec2 SlabSystem::eta_ds(const PlanePoint& v, double s) const {
  const auto& p = params_;
  if (p.variant == SystemVariant::Product) return Vec2::Zero();
  Vec2 out = Vec2::Zero();
  const double dsh = kTwoPi * std::cos(kTwoPi * s);
  if (p.shear_u != 0.0) {
    const double mod = 1.0 + p.plane_mod * std::cos(kTwoPi * (v.x() + v.y()));
    out += (p.shear_u * dsh * mod) * linear_.e_u();
  }
  if (p.shear_s != 0.0) {
    out += (p.shear_s * dsh) * linear_.e_s();
  }
  if (p.da_unit != 0.0 && s < p.da_depth) {
    const double ddepth = window_prime(s / p.da_depth) / p.da_depth;
    PlanePoint u;
    const double chi = lattice_bump(v, p.da_radius, &u);
    if (chi > 0.0) {
      out -= (p.da_unit * ddepth * chi * linear_.project_u(u)) * linear_.e_u();
    }
  }
  return out;
}

SlabPoint SlabSystem::forward_once(const SlabPoint& p) const {
  PlanePoint v = linear_.apply(p.v);
  if (params_.epsilon != 0.0) v += params_.epsilon * eta(p.v, p.s);
  return {v, psi(p.s)};
}

SlabPoint SlabSystem::inverse_once(const SlabPoint& p) const {
  const double s = psi_inverse(p.s);
  PlanePoint v = linear_.apply_inverse(p.v);
  if (params_.epsilon != 0.0) {
    const double scale = std::max(1.0, p.v.lpNorm<Eigen::Infinity>());
    v = linear_.apply_inverse(p.v - params_.epsilon * eta(v, s));
    const Mat2 amat = linear_.matrix();
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      const Vec2 f = linear_.apply(v) + params_.epsilon * eta(v, s) - p.v;
      if (f.lpNorm<Eigen::Infinity>() < 1e-13 * scale) {
        ok = true;
        break;
      }
      const Mat2 jac = amat + params_.epsilon * eta_dv(v, s);
      v -= jac.partialPivLu().solve(f);
    }
    if (!ok) throw ConvergenceError("slab map inversion did not converge");
  }
  return {v, s};
}

Mat3 SlabSystem::derivative_once(const SlabPoint& p) const {
  Mat3 d = Mat3::Zero();
  Mat2 plane = linear_.matrix();
  if (params_.epsilon != 0.0) plane += params_.epsilon * eta_dv(p.v, p.s);
  d.topLeftCorner<2, 2>() = plane;
  if (params_.epsilon != 0.0) {
    d.topRightCorner<2, 1>() = params_.epsilon * eta_ds(p.v, p.s);
  }
  d(2, 2) = psi_prime(p.s);
  return d;
}

SlabPoint SlabSystem::forward(const SlabPoint& p) const {
  SlabPoint q = forward_once(p);
  for (int k = 1; k < params_.power; ++k) q = forward_once(q);
  return q;
}

SlabPoint SlabSystem::inverse(const SlabPoint& p) const {
  SlabPoint q = inverse_once(p);
  for (int k = 1; k < params_.power; ++k) q = inverse_once(q);
  return q;
}

Mat3 SlabSystem::derivative(const SlabPoint& p) const {
  Mat3 d = derivative_once(p);
  SlabPoint q = p;
  for (int k = 1; k < params_.power; ++k) {
    q = forward_once(q);
    d = derivative_once(q) * d;
  }
  return d;
}

FaceTag SlabSystem::face_tag(int face) const {
  switch (params_.variant) {
    case SystemVariant::Product: return FaceTag::SuTangent;
    case SystemVariant::Bump:
    case SystemVariant::Sink: return FaceTag::CsTangent;
    case SystemVariant::CuBoundary:
      return face == 0 ? FaceTag::CsTangent : FaceTag::CuTangent;
  }
  return FaceTag::SuTangent;
}

SurfaceSystem SlabSystem::restrict_to_boundary(int face) const {
  if (face != 0 && face != 1) throw PreconditionError("face must be 0 or 1");
  const bool inverted = face_tag(face) == FaceTag::CuTangent;
  return SurfaceSystem(*this, face, inverted);
}

SurfaceSystem::SurfaceSystem(const SlabSystem& parent, int face, bool inverted)
    : parent_(parent),
      linear_(inverted ? parent.linear_model().inverse()
                       : parent.linear_model()),
      face_(face),
      inverted_(inverted),
      s_face_(face == 0 ? 0.0 : 1.0) {}

PlanePoint SurfaceSystem::forward(const PlanePoint& v) const {
  return inverted_ ? parent_.inverse({v, s_face_}).v
                   : parent_.forward({v, s_face_}).v;
}

PlanePoint SurfaceSystem::inverse(const PlanePoint& v) const {
  return inverted_ ? parent_.forward({v, s_face_}).v
                   : parent_.inverse({v, s_face_}).v;
}

Mat2 SurfaceSystem::derivative(const PlanePoint& v) const {
  if (!inverted_) {
    Mat2 d = parent_.derivative({v, s_face_}).topLeftCorner<2, 2>();
    return d;
  }
  const PlanePoint pre = forward(v);
  Mat2 d = parent_.derivative({pre, s_face_}).topLeftCorner<2, 2>();
  return d.inverse();
}

SlabSystem build_product(const ToralAutomorphism& a, double kappa, int power) {
  if (!(kappa > -3.9 && kappa < 1.95)) {
    throw PreconditionError("kappa leaves the transverse cubic monotone range");
  }
  SlabSystemParams p;
  p.variant = SystemVariant::Product;
  p.kappa = kappa;
  p.power = power;
  return SlabSystem(a, p);
}

namespace {

double solve_mid_rate(double nu0, double nu1, double w0, double w1) {
  const double denom = 1.0 - 0.5 * (w0 + w1);
  return (1.0 - 0.5 * (nu0 * w0 + nu1 * w1)) / denom;
}

}  // namespace

SlabSystem build_perturbed(const ToralAutomorphism& a, double epsilon,
                           SystemVariant variant,
                           const PerturbedOptions& opts) {
  if (epsilon < 0.0) throw PreconditionError("epsilon must be >= 0");
  if (variant == SystemVariant::Product) {
    return build_product(a, 0.0, opts.power);
  }
  if (epsilon == 0.0) {
    // Degenerate case: the perturbed families all collapse to A x id.
    return build_product(a, 0.0, opts.power);
  }

  const double lu = a.lambda_u();
  const double ls = std::abs(a.lambda_s());

  SlabSystemParams p;
  p.variant = variant;
  p.epsilon = epsilon;
  p.power = opts.power;

  // Tuned per-variant defaults; all pass the 64x64x16 cone certificate for
  // the [[2,1],[1,1]] linear model at the preset epsilon.
  if (variant == SystemVariant::Bump || variant == SystemVariant::Sink) {
    const double nu_default = variant == SystemVariant::Sink ? 3.9 : 3.4;
    p.nu0 = opts.nu0 > 0.0 ? opts.nu0 : nu_default;
    p.nu1 = opts.nu1 > 0.0 ? opts.nu1 : p.nu0;
    const double beta = opts.beta;
    if (!(beta > ls + 0.05 && beta < 1.0)) {
      throw PreconditionError("interior transverse rate must lie in (|lambda_s|, 1)");
    }
    const double wsym = (1.0 - beta) / (0.5 * (p.nu0 + p.nu1) - beta);
    p.w0 = opts.w0 > 0.0 ? opts.w0 : wsym;
    p.w1 = opts.w1 > 0.0 ? opts.w1 : wsym;
    p.shear_u = opts.shear_u >= 0.0 ? opts.shear_u
                                    : (variant == SystemVariant::Sink ? 0.6 : 1.0);
    p.shear_s = opts.shear_s >= 0.0 ? opts.shear_s : 0.0;
    p.plane_mod = opts.plane_mod >= 0.0
                      ? opts.plane_mod
                      : (variant == SystemVariant::Sink ? 0.0 : 0.25);
  } else {  // CuBoundary
    p.nu0 = opts.nu0 > 0.0 ? opts.nu0 : 3.4;
    p.nu1 = opts.nu1 > 0.0 ? opts.nu1 : 0.25;
    p.w0 = opts.w0 > 0.0 ? opts.w0 : 0.16;
    p.w1 = opts.w1 > 0.0 ? opts.w1 : 0.25;
    p.shear_u = opts.shear_u >= 0.0 ? opts.shear_u : 1.0;
    p.shear_s = opts.shear_s >= 0.0 ? opts.shear_s : 1.0;
    p.plane_mod = opts.plane_mod >= 0.0 ? opts.plane_mod : 0.25;
    if (!(p.nu1 < ls * 0.98)) {
      throw PreconditionError("cu-tangent face needs transverse rate below |lambda_s|");
    }
  }

  if (!(p.nu0 > lu * 1.02)) {
    throw PreconditionError("cs-tangent face needs transverse rate above lambda_u");
  }
  if (p.w0 + p.w1 > 0.95) {
    throw PreconditionError("transverse profile windows overlap");
  }
  p.mid = solve_mid_rate(p.nu0, p.nu1, p.w0, p.w1);
  if (!(p.mid > 0.05)) {
    throw PreconditionError("transverse profile loses monotonicity");
  }

  if (variant == SystemVariant::Sink) {
    if (!(opts.sink_mu > ls + 0.05 && opts.sink_mu < 1.0)) {
      throw PreconditionError("sink rate must lie in (|lambda_s|, 1)");
    }
    p.da_unit = lu - opts.sink_mu;  // calibrated for epsilon = 1
    p.da_radius = opts.da_radius;
    p.da_depth = opts.da_depth;
  }

  SlabSystem sys(a, p);

  if (opts.certify) {
    SplittingOptions sopts;
    sopts.tol = 1e-7;
    PartialHyperbolicityCertificate cert;
    try {
      cert = verify_partial_hyperbolicity(sys, opts.cert_n1, opts.cert_n2,
                                          opts.cert_ns, sopts);
    } catch (const ConvergenceError& e) {
      throw EpsilonTooLargeError(std::string("splitting diverged during certification: ") + e.what());
    } catch (const DegenerateSplittingError& e) {
      throw EpsilonTooLargeError(std::string("splitting degenerate during certification: ") + e.what());
    }
    if (!cert.pass) {
      throw EpsilonTooLargeError(
          "partial-hyperbolicity certificate failed (min gap " +
          std::to_string(std::min(
              std::min(cert.gap_center_over_stable, cert.gap_unstable_over_center),
              std::min(cert.min_unstable_expansion, cert.min_stable_contraction))) +
          ")");
    }
  }
  return sys;
}

}  // namespace phslab
