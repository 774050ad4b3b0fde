#include "orbmod/zero_fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orbmod/moment.hpp"

namespace orbmod {

EigenOrbit make_orbit(const GroupData& data, const Vec& lambda, Real tol) {
  if (lambda.size() != data.n()) throw ValidationError("orbit base point must lie in C^" + std::to_string(data.n()));
  EigenOrbit o;
  o.base = lambda;
  for (const auto& q : data.group().q) o.points.push_back(q * lambda);
  const Real scale = std::max(1.0, lambda.norm());
  for (size_t i = 0; i < o.points.size(); ++i) {
    bool fresh = true;
    for (size_t j = 0; j < i && fresh; ++j) fresh = (o.points[i] - o.points[j]).norm() > tol * scale;
    o.distinct += fresh ? 1 : 0;
  }
  return o;
}

EquivariantPoint diagonal_point(const GroupData& data, const EigenOrbit& orbit, Real tol) {
  const int r = data.r();
  const int n = data.n();
  if (static_cast<int>(orbit.points.size()) != r) throw ValidationError("orbit must list one point per group element");
  const Real scale = std::max(1.0, orbit.base.norm());
  for (int g = 0; g < r; ++g)
    if ((orbit.points[g] - data.group().q[g] * orbit.base).norm() > tol * scale)
      throw ValidationError("orbit is not closed under the Q-action");
  std::vector<Mat> comps(static_cast<size_t>(n), Mat::Zero(r, r));
  for (int g = 0; g < r; ++g)
    for (int i = 0; i < n; ++i) comps[i](g, g) = orbit.points[g](i);
  return make_point(data, std::move(comps));
}

JointDiagonalization joint_diagonalize(const EquivariantPoint& a, Rng& rng, Real tol) {
  const int r = a.r();
  const Real scale = std::max(1.0, a.norm());
  if (psi_residual(a) > tol * scale * scale) throw ValidationError("joint_diagonalize: components do not commute");
  if (mu(a).norm() > tol * scale * scale) throw ValidationError("joint_diagonalize: components are not normal (μ ≠ 0)");

  std::normal_distribution<Real> nd;
  JointDiagonalization out;
  const int max_attempts = 8;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    out.attempts = attempt;
    Mat m = Mat::Zero(r, r);
    for (const auto& c : a.components) {
      const Real s = nd(rng);
      const Real t = nd(rng);
      m += s * c + t * c.adjoint();
    }
    Eigen::ComplexSchur<Mat> schur(m);
    const Mat& u = schur.matrixU();
    const Vec ev = schur.matrixT().diagonal();
    // accidental near-coincidences of eigenvalues call for fresh coefficients,
    // exact ones (repeated joint eigenvalues) are harmless
    Real min_gap = std::numeric_limits<Real>::infinity();
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) {
        const Real gap = std::abs(ev(i) - ev(j));
        if (gap > 1e-10 * scale) min_gap = std::min(min_gap, gap);
      }
    out.u = u;
    out.eigenvalues.assign(static_cast<size_t>(r), Vec::Zero(a.n()));
    out.offdiag_residual = 0;
    for (int i = 0; i < a.n(); ++i) {
      Mat d = u.adjoint() * a.components[i] * u;
      for (int j = 0; j < r; ++j) out.eigenvalues[j](i) = d(j, j);
      d.diagonal().setZero();
      out.offdiag_residual = std::max(out.offdiag_residual, d.norm());
    }
    if (out.offdiag_residual <= tol * scale && min_gap > 1e-7 * scale) return out;
    if (out.offdiag_residual <= tol * scale && attempt == max_attempts) return out;
  }
  throw NumericalError("joint_diagonalize: off-diagonal residual " + std::to_string(out.offdiag_residual) +
                       " after " + std::to_string(max_attempts) + " attempts");
}

OrbitMatch match_orbits(const GroupData& data, const std::vector<Vec>& points, Real tol) {
  const auto& g = data.group();
  OrbitMatch out;
  std::vector<bool> used(points.size(), false);
  Real scale = 1.0;
  for (const auto& p : points) scale = std::max(scale, p.norm());
  for (size_t seed = 0; seed < points.size(); ++seed) {
    if (used[seed]) continue;
    std::vector<int> orbit(static_cast<size_t>(g.order), -1);
    for (int gm = 0; gm < g.order; ++gm) {
      const Vec target = g.q[gm] * points[seed];
      int best = -1;
      Real best_err = std::numeric_limits<Real>::infinity();
      for (size_t j = 0; j < points.size(); ++j) {
        if (used[j]) continue;
        const Real e = (points[j] - target).cwiseAbs().maxCoeff();
        if (e < best_err) {
          best_err = e;
          best = static_cast<int>(j);
        }
      }
      if (best < 0 || best_err > tol * scale) {
        out.ok = false;
        out.max_error = std::max(out.max_error, best < 0 ? std::numeric_limits<Real>::infinity() : best_err);
        return out;
      }
      used[static_cast<size_t>(best)] = true;
      orbit[static_cast<size_t>(gm)] = best;
      out.max_error = std::max(out.max_error, best_err);
    }
    out.orbits.push_back(std::move(orbit));
  }
  out.ok = true;
  return out;
}

Real orbit_distance(const GroupData& data, const EigenOrbit& orbit, const std::vector<Vec>& points) {
  const int r = data.r();
  if (static_cast<int>(points.size()) != r) return std::numeric_limits<Real>::infinity();
  // relabel by γ: points should be a permutation of {Q(δ)λ}; greedy nearest
  // assignment is exact once errors are far below the orbit's separation
  std::vector<bool> used(static_cast<size_t>(r), false);
  Real worst = 0;
  for (int g = 0; g < r; ++g) {
    int pick = -1;
    Real e_pick = std::numeric_limits<Real>::infinity();
    for (int j = 0; j < r; ++j) {
      if (used[static_cast<size_t>(j)]) continue;
      const Real e = (points[static_cast<size_t>(j)] - orbit.points[static_cast<size_t>(g)]).cwiseAbs().maxCoeff();
      if (e < e_pick) {
        e_pick = e;
        pick = j;
      }
    }
    used[static_cast<size_t>(pick)] = true;
    worst = std::max(worst, e_pick);
  }
  return worst;
}

HorizontalityReport horizontality_check(const GroupData& data, const EquivariantPoint& a, Real tol) {
  const int r = a.r();
  for (const auto& c : a.components) {
    Mat off = c;
    off.diagonal().setZero();
    if (off.norm() > tol * std::max(1.0, c.norm())) throw ValidationError("horizontality_check needs a diagonal point");
  }
  HorizontalityReport rep;
  rep.vacuous = a.norm() == 0.0;

  // real basis of Δ^Γ: diagonal points over λ = e_i and i·e_i
  std::vector<EquivariantPoint> slice;
  for (int i = 0; i < data.n(); ++i)
    for (Complex s : {Complex(1.0), kI}) {
      Vec l = Vec::Zero(data.n());
      l(i) = s;
      slice.push_back(diagonal_point(data, make_orbit(data, l)));
    }

  std::vector<Mat> lie = data.pu_basis();
  lie.push_back(kI * Mat::Identity(r, r));
  for (const auto& xi : lie) {
    GradedElement t(a.n(), r, 0, 1);
    for (int k = 0; k < a.n(); ++k) {
      const Mat b = commutator(xi, a.components[k]);
      rep.max_diagonal = std::max(rep.max_diagonal, b.diagonal().cwiseAbs().maxCoeff());
      t.at({}, {k}) = b;
    }
    for (const auto& d : slice)
      rep.max_inner = std::max(rep.max_inner, std::abs(inner_products(t, as_form(d)).g));
  }
  return rep;
}

nlohmann::json to_json(const EigenOrbit& o) {
  auto vec = [](const Vec& v) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back({v(i).real(), v(i).imag()});
    return j;
  };
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : o.points) pts.push_back(vec(p));
  return {{"base", vec(o.base)}, {"orbit", pts}, {"distinct", o.distinct}};
}

}  // namespace orbmod
