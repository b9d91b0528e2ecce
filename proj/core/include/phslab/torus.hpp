#ifndef PHSLAB_TORUS_HPP
#define PHSLAB_TORUS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "phslab/errors.hpp"

namespace phslab {

using PlanePoint = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Deck-translation components of the Z^2 action on the universal cover.
struct LatticeVector {
  std::int64_t z1 = 0;
  std::int64_t z2 = 0;

  friend LatticeVector operator+(LatticeVector a, LatticeVector b) {
    return {a.z1 + b.z1, a.z2 + b.z2};
  }
  friend LatticeVector operator-(LatticeVector a, LatticeVector b) {
    return {a.z1 - b.z1, a.z2 - b.z2};
  }
  LatticeVector operator-() const { return {-z1, -z2}; }
  friend bool operator==(LatticeVector a, LatticeVector b) {
    return a.z1 == b.z1 && a.z2 == b.z2;
  }
  PlanePoint to_plane() const {
    return PlanePoint(static_cast<double>(z1), static_cast<double>(z2));
  }
};

// Point of the slab R^2 x [0,1]; v is the universal-cover plane coordinate
// and s the transverse coordinate.
struct SlabPoint {
  PlanePoint v{0.0, 0.0};
  double s = 0.0;
};

inline SlabPoint operator+(const SlabPoint& p, const LatticeVector& z) {
  return {p.v + z.to_plane(), p.s};
}

// Hyperbolic integer 2x2 matrix together with its eigen data and the dual
// projections pi_u, pi_s normalized by pi_u(e_u) = pi_s(e_s) = 1.
class ToralAutomorphism {
 public:
  // Throws PreconditionError unless |det| = 1 and NotHyperbolicError when an
  // eigenvalue has modulus one.
  static ToralAutomorphism from_matrix(std::int64_t a, std::int64_t b,
                                       std::int64_t c, std::int64_t d);

  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }
  std::int64_t c() const { return c_; }
  std::int64_t d() const { return d_; }
  std::int64_t det() const { return a_ * d_ - b_ * c_; }

  double lambda_u() const { return lambda_u_; }
  double lambda_s() const { return lambda_s_; }
  const Vec2& e_u() const { return e_u_; }
  const Vec2& e_s() const { return e_s_; }

  Mat2 matrix() const;
  Mat2 inverse_matrix() const;  // exact: adj(A)/det with integer entries

  PlanePoint apply(const PlanePoint& v) const;
  PlanePoint apply_inverse(const PlanePoint& v) const;
  PlanePoint apply_lattice(const LatticeVector& z) const;  // A z, integer exact

  double project_u(const PlanePoint& v) const { return pi_u_.dot(v); }
  double project_s(const PlanePoint& v) const { return pi_s_.dot(v); }

  // Dual-basis reconstruction: the unique v with project_u(v) = hu and
  // project_s(v) = hs.
  PlanePoint from_projections(double hu, double hs) const {
    return hu * e_u_ + hs * e_s_;
  }

  // Covector rows of the projections (gradients of pi_u, pi_s).
  const Vec2& pi_u_vector() const { return pi_u_; }
  const Vec2& pi_s_vector() const { return pi_s_; }

  ToralAutomorphism inverse() const;

 private:
  ToralAutomorphism() = default;

  std::int64_t a_ = 1, b_ = 0, c_ = 0, d_ = 1;
  double lambda_u_ = 0.0, lambda_s_ = 0.0;
  Vec2 e_u_{0, 0}, e_s_{0, 0};
  Vec2 pi_u_{0, 0}, pi_s_{0, 0};
};

// Half-open fundamental cell [0,1)^2: v = reduced + z exactly, with
// tie-breaking at integer coordinates (1.0 reduces to 0.0 with carry).
std::pair<PlanePoint, LatticeVector> reduce_mod_lattice(const PlanePoint& v);

}  // namespace phslab

#endif
