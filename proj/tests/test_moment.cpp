#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "orbmod/moment.hpp"
#include "orbmod/su3.hpp"
#include "orbmod/zero_fiber.hpp"

using namespace orbmod;

namespace {

std::vector<Mat> conjugate(const std::vector<Mat>& c, const Mat& k) {
  const Mat ki = k.inverse();
  std::vector<Mat> out;
  for (const auto& m : c) out.push_back(k * m * ki);
  return out;
}

}  // namespace

TEST_CASE("ψ vanishes exactly on commuting tuples") {
  const auto data = GroupData::load("1/3(1,1,1)");
  CHECK(psi_residual(point1(*data, 1, 2)) < 1e-14);
  Rng rng(1);
  auto a = random_point(*data, rng);
  EquivariantPoint single = zero_point(*data);
  single.components[1] = a.components[1];
  CHECK(psi_residual(single) == 0.0);
  // weighted norm: ‖ψ‖² = 4 Σ_{i<j} ‖[α_i, α_j]‖²
  Real direct = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) direct += commutator(a.components[i], a.components[j]).squaredNorm();
  CHECK(norm(psi(a)) * norm(psi(a)) == doctest::Approx(4.0 * direct).epsilon(1e-12));
  CHECK(psi_residual(a) * psi_residual(a) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(psi(a).q() == 2);
}

TEST_CASE("μ on the worked point is diag(−A², A² − B², B²)") {
  const auto data = GroupData::load("1/3(1,1,1)");
  for (auto [A, B] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}, {0.3, -1.7}}) {
    const Mat m = to_character_basis(*data, mu(point1(*data, A, B)));
    RVec expect(3);
    expect << -A * A, A * A - B * B, B * B;
    CHECK((m - expect.cast<Complex>().asDiagonal().toDenseMatrix()).norm() < 1e-12);
  }
}

TEST_CASE("μ is Hermitian, traceless, Γ-central; zero on normal tuples") {
  const auto data = GroupData::load("1/7(1,2,4)");
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat m = mu(random_point(*data, rng));
    CHECK(hermitian_residual(m) < 1e-12);
    CHECK(std::abs(m.trace()) < 1e-12);
    for (const auto& p : data->regular().phi) CHECK(commutator(m, p).norm() < 1e-10);
  }
  CHECK(mu(zero_point(*data)).norm() == 0.0);
  Vec lambda(3);
  lambda << Complex(1, 2), Complex(-0.5, 0.1), Complex(0.3, 0.3);
  CHECK(mu(diagonal_point(*data, make_orbit(*data, lambda))).norm() < 1e-14);
}

TEST_CASE("moment-map laws: K^Γ-equivariance and quadratic homogeneity") {
  Rng rng(3);
  for (const char* spec : {"1/3(1,1,1)", testing::kQuaternionSpec}) {
    const auto data = GroupData::load(spec);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_point(*data, rng);
      const Mat u = random_commutant_unitary(*data, rng);
      const Real t = std::exp(std::uniform_real_distribution<Real>(-2, 2)(rng));
      const Complex phase = std::polar(t, 1.3 * trial);
      CHECK((mu(conjugate(a.components, u)) - u * mu(a) * u.adjoint()).norm() < 1e-10 * (1 + mu(a).norm()));
      std::vector<Mat> scaled;
      for (const auto& c : a.components) scaled.push_back(phase * c);
      CHECK((mu(scaled) - t * t * mu(a)).norm() < 1e-10 * t * t * (1 + mu(a).norm()));
    }
  }
}

TEST_CASE("dμ along [H, ·] matches a finite difference") {
  const auto data = GroupData::load("1/3(1,1,1)");
  Rng rng(4);
  const auto a = random_point(*data, rng);
  Mat h = project_commutant(*data, testing::random_matrix(rng, 3, 3));
  h = (h + h.adjoint()).eval();
  const Real s = 1e-6;
  const auto plus = conjugate(a.components, exp_hermitian(h, s));
  const auto minus = conjugate(a.components, exp_hermitian(h, -s));
  const Mat fd = (mu(plus) - mu(minus)) / (2 * s);
  CHECK((fd - mu_derivative(a.components, h)).norm() < 1e-6 * (1 + fd.norm()));
}

TEST_CASE("μ′ is the Gram matrix of the components") {
  const auto data = GroupData::load("1/3(1,1,1)");
  Rng rng(5);
  const auto a = random_point(*data, rng);
  const Mat t = mu_prime(a);
  CHECK(hermitian_residual(t) < 1e-12);
  CHECK(std::abs(t(0, 1) - (a.components[0] * a.components[1].adjoint()).trace()) < 1e-12);
}

TEST_CASE("GIT invariants: zero on the nilpotent worked point, G^Γ-invariant") {
  const auto data = GroupData::load("1/3(1,1,1)");
  const auto inv = git_invariants(point1(*data, 1, 1), 3);
  CHECK(inv.size() == 3 + 9 + 27);
  for (const auto& v : inv) CHECK(std::abs(v) < 1e-12);

  Rng rng(6);
  Vec lambda(3);
  lambda << 1.0, Complex(0.2, -0.4), Complex(0.5, 0.5);
  const auto d = diagonal_point(*data, make_orbit(*data, lambda));
  Mat k = project_commutant(*data, testing::random_matrix(rng, 3, 3)) + 2.0 * Mat::Identity(3, 3);
  const auto moved = make_point(*data, conjugate(d.components, k));
  const auto a = git_invariants(d, 3), b = git_invariants(moved, 3);
  for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9 * (1 + std::abs(a[i])));
  // degree-3 word trace(α₁³) = Σ_γ λ_1(γ)³ = 3λ_1³ for weights (1,1,1)
  CHECK(std::abs(a[3 + 9] - 3.0 * std::pow(lambda(0), 3)) < 1e-10);
}

TEST_CASE("stabilizer dimensions") {
  const auto data = GroupData::load("1/3(1,1,1)");
  CHECK(stabilizer_dim(*data, point1(*data, 1, 1)) == 0);
  CHECK(stabilizer_dim(*data, zero_point(*data)) == 2);
  Vec lambda(3);
  lambda << 1.0, 2.0, 3.0;
  CHECK(stabilizer_dim(*data, diagonal_point(*data, make_orbit(*data, lambda))) == 0);
  // α₁ = A·E₀₁ alone: the third block decouples and a circle survives
  CHECK(stabilizer_dim(*data, point1(*data, 1, 0)) == 1);
}

TEST_CASE("ζ parsing and validation") {
  CHECK(parse_zeta("-1,0,1") == std::vector<Real>{-1, 0, 1});
  CHECK(parse_zeta("(1/2, -1/4, -1/4)") == std::vector<Real>{0.5, -0.25, -0.25});
  CHECK(parse_zeta("").empty());
  CHECK_THROWS_AS(parse_zeta("1,,2"), ValidationError);
  CHECK_THROWS_AS(parse_zeta("1/0,1"), ValidationError);
  CHECK_THROWS_AS(parse_zeta("a,b"), ValidationError);

  const auto data = GroupData::load("1/3(1,1,1)");
  CHECK_THROWS_AS(make_zeta(*data, {1, 1, 1}), ValidationError);
  CHECK_THROWS_AS(make_zeta(*data, {1, -1}), ValidationError);
  const auto z = make_zeta(*data, {-1, 0, 1});
  CHECK(std::abs(z.matrix.trace()) < 1e-12);
  for (const auto& p : data->regular().phi) CHECK(commutator(z.matrix, p).norm() < 1e-12);
  CHECK_FALSE(z.is_zero());
  CHECK(zero_zeta(*data).is_zero());

  const auto q8 = GroupData::load(testing::kQuaternionSpec);
  // weights d_i²: four 1-dimensional blocks and one 2-dimensional block
  std::vector<Real> c(5, 1.0);
  size_t big = 0;
  for (size_t i = 0; i < 5; ++i)
    if (q8->centre().structure.blocks[i].irrep_dim == 2) big = i;
  c[big] = -1.0;
  CHECK_NOTHROW(make_zeta(*q8, c));
}

TEST_CASE("flow: seeded nilpotent starts reach μ⁻¹(−1,0,1)") {
  const auto data = GroupData::load("1/3(1,1,1)");
  const auto z = make_zeta(*data, {-1, 0, 1});
  int good = 0;
  for (int s = 0; s < 20; ++s) {
    Rng rng(100 + s);
    const auto a0 = nilpotent_start(*data, rng);
    CHECK(psi_residual(a0) < 1e-13);
    const auto f = kempf_ness_flow(*data, a0, z);
    if (f.status == FlowStatus::converged && f.mu_residual <= 1e-10 && f.psi_drift <= 1e-9) ++good;
    if (f.status == FlowStatus::converged) {
      CHECK(f.mu_residual <= 1e-10);
      CHECK(f.psi_residual <= 1e-10 * std::max(1.0, f.alpha.norm() * f.alpha.norm()));
      // the output lies in the G^Γ orbit of the start
      const auto moved = conjugate(a0.components, f.k);
      CHECK(tuple_norm([&] {
              std::vector<Mat> d;
              for (size_t i = 0; i < moved.size(); ++i) d.push_back(moved[i] - f.alpha.components[i]);
              return d;
            }()) < 1e-8 * (1 + a0.norm()));
      for (const auto& v : git_invariants(f.alpha, 3)) CHECK(std::abs(v) < 1e-8);
    }
  }
  CHECK(good >= 18);
}

TEST_CASE("flow: α = 0 is unstable for ζ ≠ 0 and the cone point for ζ = 0") {
  const auto data = GroupData::load("1/3(1,1,1)");
  CHECK(kempf_ness_flow(*data, zero_point(*data), make_zeta(*data, {-1, 0, 1})).status != FlowStatus::converged);
  Rng rng(9);
  const auto f = kempf_ness_flow(*data, nilpotent_start(*data, rng), zero_zeta(*data));
  CHECK(f.status == FlowStatus::converged);
  CHECK(f.snapped_to_origin);
  CHECK(f.alpha.norm() == 0.0);
}

TEST_CASE("flow: the worked point is already on its level set") {
  const auto data = GroupData::load("1/3(1,1,1)");
  const auto f = kempf_ness_flow(*data, point1(*data, 1, 1), make_zeta(*data, {-1, 0, 1}));
  CHECK(f.status == FlowStatus::converged);
  CHECK(f.iterations == 0);
  // re-targeting point1(1,2) to (−1,0,1) stays in the nilpotent fibre
  const auto g = kempf_ness_flow(*data, point1(*data, 1, 2), make_zeta(*data, {-1, 0, 1}));
  CHECK(g.status == FlowStatus::converged);
  CHECK(g.mu_residual <= 1e-10);
  for (const auto& v : git_invariants(g.alpha, 3)) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("flow: diagonal starts at ζ ≠ 0 converge; residual history decreases") {
  const auto data = GroupData::load("1/3(1,1,1)");
  Vec lambda(3);
  lambda << 1.0, Complex(0.3, 0.7), Complex(-0.4, 0.1);
  FlowOptions fo;
  fo.record_history = true;
  const auto f = kempf_ness_flow(*data, diagonal_point(*data, make_orbit(*data, lambda)), make_zeta(*data, {1, 1, -2}), fo);
  CHECK(f.status == FlowStatus::converged);
  for (size_t i = 1; i < f.residual_history.size(); ++i)
    CHECK(f.residual_history[i] <= f.residual_history[i - 1] * (1 + 1e-12));
  CHECK(f.log_norm > 0);
}

TEST_CASE("flow: preconditions and the iteration cap") {
  const auto data = GroupData::load("1/3(1,1,1)");
  Rng rng(10);
  CHECK_THROWS_AS(kempf_ness_flow(*data, random_point(*data, rng), make_zeta(*data, {-1, 0, 1})), ValidationError);
  FlowOptions fo;
  fo.max_iter = 1;
  Rng rng2(11);
  CHECK_THROWS_AS(kempf_ness_flow(*data, nilpotent_start(*data, rng2), make_zeta(*data, {-1, 0, 1}), fo),
                  NumericalError);
  const auto other = GroupData::load("1/7(1,2,4)");
  CHECK_THROWS_AS(kempf_ness_flow(*other, point1(*data, 1, 1), make_zeta(*data, {-1, 0, 1})), ValidationError);
}

TEST_CASE("nilpotent starts") {
  const auto data = GroupData::load("1/7(1,2,4)");
  for (int s = 0; s < 5; ++s) {
    Rng rng(s);
    const auto a = nilpotent_start(*data, rng, s % 2 == 1);
    CHECK(a.equivariance_residual < 1e-10);
    CHECK(psi_residual(a) < 1e-12);
    CHECK(a.norm() > 0);
    for (const auto& v : git_invariants(a, 4)) CHECK(std::abs(v) < 1e-10);
  }
  const auto q8 = GroupData::load(testing::kQuaternionSpec);
  Rng rng(0);
  CHECK_THROWS_AS(nilpotent_start(*q8, rng), ValidationError);
}

TEST_CASE("character basis round trip and JSON") {
  const auto data = GroupData::load("1/3(1,1,1)");
  Rng rng(12);
  const Mat x = testing::random_matrix(rng, 3, 3);
  CHECK((to_character_basis(*data, from_character_basis(*data, x)) - x).norm() < 1e-12);
  const auto f = kempf_ness_flow(*data, point1(*data, 1, 1), make_zeta(*data, {-1, 0, 1}));
  const auto j = to_json(f, true);
  CHECK(j.at("status") == "converged");
  CHECK(j.contains("alpha"));
  CHECK(j.at("mu_residual").get<Real>() <= 1e-10);
}
