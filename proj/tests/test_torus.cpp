#include <doctest.h>

#include <cmath>
#include <random>

#include "phslab/errors.hpp"
#include "phslab/torus.hpp"

using namespace phslab;

TEST_SUITE_BEGIN("torus");

namespace {

// Independent oracle: roots of t^2 - tr t + det by the closed-form quadratic
// solve, larger modulus first.
std::pair<double, double> quadratic_roots(long long tr, long long det) {
  const double trd = static_cast<double>(tr);
  const double disc = std::sqrt(trd * trd - 4.0 * det);
  const double r1 = (trd >= 0.0 ? trd + disc : trd - disc) / 2.0;
  const double r2 = det / r1;
  return std::abs(r1) >= std::abs(r2) ? std::pair{r1, r2} : std::pair{r2, r1};
}

}  // namespace

TEST_CASE("eigen data of the [[2,1],[1,1]] matrix matches the quadratic oracle") {
  const auto a = ToralAutomorphism::from_matrix(2, 1, 1, 1);
  const auto [lu, ls] = quadratic_roots(3, 1);
  CHECK(a.lambda_u() == doctest::Approx(lu).epsilon(1e-15));
  CHECK(a.lambda_s() == doctest::Approx(ls).epsilon(1e-15));
  // frozen values of (3 +- sqrt 5)/2
  CHECK(a.lambda_u() == doctest::Approx(2.618033988749895).epsilon(1e-15));
  CHECK(a.lambda_s() == doctest::Approx(0.3819660112501051).epsilon(1e-13));
}

TEST_CASE("non-hyperbolic matrices are rejected") {
  CHECK_THROWS_AS(ToralAutomorphism::from_matrix(1, 0, 0, 1),
                  NotHyperbolicError);
  CHECK_THROWS_AS(ToralAutomorphism::from_matrix(1, 1, 0, 1),
                  NotHyperbolicError);
  CHECK_THROWS_AS(ToralAutomorphism::from_matrix(0, 1, 1, 0),
                  NotHyperbolicError);
  CHECK_THROWS_AS(ToralAutomorphism::from_matrix(2, 0, 0, 2),
                  PreconditionError);
}

TEST_CASE("determinant -1 matrices work") {
  const auto a = ToralAutomorphism::from_matrix(1, 1, 1, 0);
  const auto [lu, ls] = quadratic_roots(1, -1);
  CHECK(a.lambda_u() == doctest::Approx(lu).epsilon(1e-15));
  CHECK(a.lambda_s() == doctest::Approx(ls).epsilon(1e-13));
  CHECK(std::abs(a.lambda_s()) < 1.0);
}

TEST_CASE("eigen identities hold to 1e-12 on a basis") {
  for (auto [ma, mb, mc, md] :
       {std::array<long long, 4>{2, 1, 1, 1}, std::array<long long, 4>{1, 1, 1, 0},
        std::array<long long, 4>{3, 2, 1, 1}}) {
    const auto a = ToralAutomorphism::from_matrix(ma, mb, mc, md);
    // A e_u = lambda_u e_u
    CHECK((a.apply(a.e_u()) - a.lambda_u() * a.e_u()).norm() < 1e-12);
    CHECK((a.apply(a.e_s()) - a.lambda_s() * a.e_s()).norm() < 1e-12);
    // pi o A = lambda pi on the standard basis
    for (const PlanePoint b : {PlanePoint(1, 0), PlanePoint(0, 1)}) {
      CHECK(a.project_u(a.apply(b)) ==
            doctest::Approx(a.lambda_u() * a.project_u(b)).epsilon(1e-12));
      CHECK(a.project_s(a.apply(b)) ==
            doctest::Approx(a.lambda_s() * a.project_s(b)).epsilon(1e-12));
    }
    // normalization and kernels
    CHECK(a.project_u(a.e_u()) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.project_s(a.e_s()) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(a.project_u(a.e_s())) < 1e-14);
    CHECK(std::abs(a.project_s(a.e_u())) < 1e-14);
    // joint injectivity of the projections
    const double det = a.pi_u_vector().x() * a.pi_s_vector().y() -
                       a.pi_u_vector().y() * a.pi_s_vector().x();
    CHECK(std::abs(det) > 0.0);
    // reproducible orientation
    CHECK(a.e_u().x() > 0.0);
    CHECK(a.e_s().x() > 0.0);
  }
}

TEST_CASE("dual-basis reconstruction inverts the projections") {
  const auto a = ToralAutomorphism::from_matrix(2, 1, 1, 1);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const PlanePoint v(U(rng), U(rng));
    const PlanePoint w = a.from_projections(a.project_u(v), a.project_s(v));
    CHECK((v - w).norm() < 1e-13 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("projection of an eigen-functional ratio recovers lambda_u") {
  const auto a = ToralAutomorphism::from_matrix(2, 1, 1, 1);
  CHECK(a.project_u(PlanePoint(0, 0)) == 0.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const PlanePoint w(U(rng), U(rng));
    if (std::abs(a.project_u(w)) < 1e-3) continue;
    CHECK(a.project_u(a.apply(w)) / a.project_u(w) ==
          doctest::Approx(a.lambda_u()).epsilon(1e-12));
  }
}

TEST_CASE("reduce_mod_lattice examples and reconstruction") {
  {
    const auto [r, z] = reduce_mod_lattice(PlanePoint(0.3, 0.7));
    CHECK(r.x() == doctest::Approx(0.3));
    CHECK(r.y() == doctest::Approx(0.7));
    CHECK(z == LatticeVector{0, 0});
  }
  {
    const auto [r, z] = reduce_mod_lattice(PlanePoint(2.5, -0.25));
    CHECK(r.x() == doctest::Approx(0.5));
    CHECK(r.y() == doctest::Approx(0.75));
    CHECK(z == LatticeVector{2, -1});
  }
  {
    // half-open cell: integer coordinates reduce to zero with carry
    const auto [r, z] = reduce_mod_lattice(PlanePoint(1.0, 1.0));
    CHECK(r.x() == 0.0);
    CHECK(r.y() == 0.0);
    CHECK(z == LatticeVector{1, 1});
  }

  std::mt19937_64 rng(20260810);
  std::uniform_real_distribution<double> U(-50.0, 50.0);
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    const PlanePoint v(U(rng), U(rng));
    const auto [r, z] = reduce_mod_lattice(v);
    CHECK(r.x() >= 0.0);
    CHECK(r.x() < 1.0);
    CHECK(r.y() >= 0.0);
    CHECK(r.y() < 1.0);
    worst = std::max(worst, (r + z.to_plane() - v).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("lattice vectors form a group under addition and negation") {
  const LatticeVector a{3, -2}, b{-1, 5};
  CHECK(a + b == LatticeVector{2, 3});
  CHECK(a - b == LatticeVector{4, -7});
  CHECK(-a == LatticeVector{-3, 2});
  CHECK(a + (-a) == LatticeVector{0, 0});
}

TEST_CASE("integer inverse matrix is exact") {
  const auto a = ToralAutomorphism::from_matrix(2, 1, 1, 1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const PlanePoint v(U(rng), U(rng));
    CHECK((a.apply_inverse(a.apply(v)) - v).norm() < 1e-12);
  }
  const auto inv = a.inverse();
  CHECK(inv.lambda_u() == doctest::Approx(1.0 / a.lambda_s()).epsilon(1e-12));
}

TEST_SUITE_END();
