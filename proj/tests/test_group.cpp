#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "orbmod/group.hpp"

using namespace orbmod;
using testing::kQuaternionSpec;

TEST_CASE("cyclic spec: elements are powers of the generator") {
  const auto g = build_group("1/3(1,1,1)");
  CHECK(g.order == 3);
  CHECK(g.dim == 3);
  CHECK(g.is_abelian());
  CHECK(g.free_outside_origin);
  CHECK(g.class_count() == 3);
  const Complex eps = std::polar(1.0, 2 * M_PI / 3);
  for (int k = 0; k < 3; ++k) {
    CHECK((g.q[k] - std::pow(eps, k) * Mat::Identity(3, 3)).norm() < 1e-14);
    CHECK(g.mul(k, g.inverse[k]) == 0);
  }
  CHECK(g.mul(1, 1) == 2);
}

TEST_CASE("cayley table matches matrix products") {
  for (const char* spec : {"1/7(1,2,4)", "1/5(1,4)", kQuaternionSpec}) {
    const auto g = build_group(spec);
    for (int a = 0; a < g.order; ++a)
      for (int b = 0; b < g.order; ++b) CHECK((g.q[a] * g.q[b] - g.q[g.mul(a, b)]).norm() < 1e-12);
    CHECK(homomorphism_residual(g) < 1e-12);
    CHECK(unitarity_residual(g) < 1e-12);
    CHECK((g.q[0] - Mat::Identity(g.dim, g.dim)).norm() < 1e-14);
  }
}

TEST_CASE("quaternion group: order 8, five classes, free") {
  const auto g = build_group(kQuaternionSpec);
  CHECK(g.order == 8);
  CHECK(g.class_count() == 5);
  CHECK_FALSE(g.is_abelian());
  CHECK(g.free_outside_origin);
}

TEST_CASE("freeness is detected, not assumed") {
  // g² = diag(-1, 1) fixes the second axis
  CHECK_FALSE(build_group("1/4(1,2)").free_outside_origin);
  CHECK(build_group("1/4(1,3)").free_outside_origin);
}

TEST_CASE("malformed specs are validation errors") {
  CHECK_THROWS_AS(build_group("1/0(1)"), ValidationError);
  CHECK_THROWS_AS(build_group("1/3(1,x)"), ValidationError);
  CHECK_THROWS_AS(build_group("1/3()"), ValidationError);
  CHECK_THROWS_AS(build_group("Z3"), ValidationError);
  CHECK_THROWS_AS(build_group(R"({"generators": []})"), ValidationError);
  CHECK_THROWS_AS(build_group(R"({"generators": [[[[2,0]]]]})"), ValidationError);  // not unitary
  CHECK_THROWS_AS(build_group(R"({"generators": [[[[0.6,0.8]]]]})"), ValidationError);  // infinite order
  GroupOptions small;
  small.order_cap = 4;
  CHECK_THROWS_AS(build_group("1/5(1,4)", small), ValidationError);
}

TEST_CASE("regular representation: φ(γ)e_δ = e_{γδ}") {
  const auto g = build_group(kQuaternionSpec);
  const auto reg = regular_rep(g);
  for (int a = 0; a < g.order; ++a)
    for (int d = 0; d < g.order; ++d) CHECK(reg.phi[a](g.mul(a, d), d) == Complex(1.0));
  CHECK(homomorphism_residual(g, reg) < 1e-14);
}

TEST_CASE("isotypic blocks: ranks d², Σd² = |Γ|, centre has N = #classes − 1") {
  SUBCASE("cyclic") {
    const auto g = build_group("1/7(1,2,4)");
    const auto reg = regular_rep(g);
    const auto c = isotypic_centre(g, reg);
    CHECK(c.structure.blocks.size() == 7);
    CHECK(c.centre_basis.size() == 6);
    CHECK(projector_residuals(c.structure, reg).max() < 1e-10);
    REQUIRE(c.character_basis);
    // φ(g) v_j = ε^j v_j
    const Complex eps = std::polar(1.0, 2 * M_PI / 7);
    const Mat& v = *c.character_basis;
    for (int j = 0; j < 7; ++j) CHECK((reg.phi[1] * v.col(j) - std::pow(eps, j) * v.col(j)).norm() < 1e-12);
  }
  SUBCASE("quaternion") {
    const auto g = build_group(kQuaternionSpec);
    const auto reg = regular_rep(g);
    const auto c = isotypic_centre(g, reg);
    int ones = 0, twos = 0, total = 0;
    for (const auto& b : c.structure.blocks) {
      (b.irrep_dim == 1 ? ones : twos)++;
      total += b.irrep_dim * b.irrep_dim;
      CHECK(std::abs(b.projector.trace().real() - b.irrep_dim * b.irrep_dim) < 1e-10);
    }
    CHECK(ones == 4);
    CHECK(twos == 1);
    CHECK(total == 8);
    CHECK(c.centre_basis.size() == 4);
    CHECK(projector_residuals(c.structure, reg).max() < 1e-10);
    for (const auto& z : c.centre_basis) {
      CHECK(std::abs(z.trace()) < 1e-10);
      CHECK(hermitian_residual(z) < 1e-12);
      for (const auto& p : reg.phi) CHECK(commutator(z, p).norm() < 1e-10);
    }
  }
}
