#include "phslab/torus.hpp"

#include <cmath>
#include <cstdlib>

namespace phslab {

namespace {

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Eigenvector of the integer matrix for eigenvalue lambda, normalized with
// positive first coordinate. A hyperbolic unimodular integer matrix never has
// an eigenvector with vanishing first coordinate (that would force b = 0 and
// |a| = |d| = 1), so the sign convention is well defined.
Vec2 eigenvector_for(double a, double b, double c, double d, double lambda) {
  Vec2 r1(b, lambda - a);
  Vec2 r2(lambda - d, c);
  Vec2 v = (r1.norm() >= r2.norm()) ? r1 : r2;
  v.normalize();
  if (v.x() < 0.0) v = -v;
  return v;
}

}  // namespace

ToralAutomorphism ToralAutomorphism::from_matrix(std::int64_t a, std::int64_t b,
                                                 std::int64_t c,
                                                 std::int64_t d) {
  const std::int64_t det = a * d - b * c;
  if (det != 1 && det != -1) {
    throw PreconditionError("toral automorphism requires determinant +-1");
  }
  const std::int64_t tr = a + d;
  // Integer test for a unit-modulus eigenvalue: with det = 1 the spectrum is
  // on the unit circle iff |tr| <= 2; with det = -1 the roots are +-1 iff
  // tr = 0.
  if ((det == 1 && std::llabs(tr) <= 2) || (det == -1 && tr == 0)) {
    throw NotHyperbolicError("matrix has an eigenvalue of modulus one");
  }

  ToralAutomorphism m;
  m.a_ = a;
  m.b_ = b;
  m.c_ = c;
  m.d_ = d;

  const double trd = static_cast<double>(tr);
  const double detd = static_cast<double>(det);
  const double disc = std::sqrt(trd * trd - 4.0 * detd);
  // Larger-magnitude root first, computed without cancellation.
  const double r1 = (trd >= 0.0) ? 0.5 * (trd + disc) : 0.5 * (trd - disc);
  const double r2 = detd / r1;
  if (std::abs(r1) >= std::abs(r2)) {
    m.lambda_u_ = r1;
    m.lambda_s_ = r2;
  } else {
    m.lambda_u_ = r2;
    m.lambda_s_ = r1;
  }

  const double ad = static_cast<double>(a), bd = static_cast<double>(b);
  const double cd = static_cast<double>(c), dd = static_cast<double>(d);
  m.e_u_ = eigenvector_for(ad, bd, cd, dd, m.lambda_u_);
  m.e_s_ = eigenvector_for(ad, bd, cd, dd, m.lambda_s_);

  const double denom = cross2(m.e_u_, m.e_s_);
  m.pi_u_ = Vec2(m.e_s_.y(), -m.e_s_.x()) / denom;
  m.pi_s_ = Vec2(-m.e_u_.y(), m.e_u_.x()) / denom;
  return m;
}

Mat2 ToralAutomorphism::matrix() const {
  Mat2 m;
  m << static_cast<double>(a_), static_cast<double>(b_),
      static_cast<double>(c_), static_cast<double>(d_);
  return m;
}

Mat2 ToralAutomorphism::inverse_matrix() const {
  const double s = static_cast<double>(det());
  Mat2 m;
  m << static_cast<double>(d_) * s, static_cast<double>(-b_) * s,
      static_cast<double>(-c_) * s, static_cast<double>(a_) * s;
  return m;
}

PlanePoint ToralAutomorphism::apply(const PlanePoint& v) const {
  return PlanePoint(static_cast<double>(a_) * v.x() + static_cast<double>(b_) * v.y(),
                    static_cast<double>(c_) * v.x() + static_cast<double>(d_) * v.y());
}

PlanePoint ToralAutomorphism::apply_inverse(const PlanePoint& v) const {
  const double s = static_cast<double>(det());
  return PlanePoint(s * (static_cast<double>(d_) * v.x() - static_cast<double>(b_) * v.y()),
                    s * (static_cast<double>(-c_) * v.x() + static_cast<double>(a_) * v.y()));
}

PlanePoint ToralAutomorphism::apply_lattice(const LatticeVector& z) const {
  return PlanePoint(static_cast<double>(a_ * z.z1 + b_ * z.z2),
                    static_cast<double>(c_ * z.z1 + d_ * z.z2));
}

ToralAutomorphism ToralAutomorphism::inverse() const {
  const std::int64_t s = det();
  return from_matrix(d_ * s, -b_ * s, -c_ * s, a_ * s);
}

std::pair<PlanePoint, LatticeVector> reduce_mod_lattice(const PlanePoint& v) {
  const double f1 = std::floor(v.x());
  const double f2 = std::floor(v.y());
  PlanePoint reduced(v.x() - f1, v.y() - f2);
  LatticeVector z{static_cast<std::int64_t>(f1), static_cast<std::int64_t>(f2)};
  return {reduced, z};
}

}  // namespace phslab
