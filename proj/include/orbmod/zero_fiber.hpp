#pragma once

#include <vector>

#include "json.hpp"
#include "orbmod/equivariant.hpp"

namespace orbmod {

/// The Γ-orbit {Q(γ)λ : γ ∈ Γ} of a point λ ∈ C^n, indexed by group element.
struct EigenOrbit {
  Vec base;
  std::vector<Vec> points;
  /// Number of pairwise distinct points (r for λ ≠ 0 under a free action).
  int distinct = 0;
};

EigenOrbit make_orbit(const GroupData& data, const Vec& lambda, Real tol = 1e-12);

/// α_i = diag_γ (Q(γ)λ)_i: the point of the diagonal slice Δ^Γ over the orbit.
/// Throws ValidationError when `orbit.points` is not the Q-orbit of its base.
EquivariantPoint diagonal_point(const GroupData& data, const EigenOrbit& orbit, Real tol = 1e-10);

struct JointDiagonalization {
  /// U*α_iU is diagonal; column j is the joint eigenvector e_j.
  Mat u;
  /// eigenvalues[j] = (⟨e_j, α_1 e_j⟩, …, ⟨e_j, α_n e_j⟩)
  std::vector<Vec> eigenvalues;
  Real offdiag_residual = 0;
  int attempts = 0;
};

/// Simultaneous diagonalization of a normal commuting tuple by the Schur
/// form of a random real combination Σ c_i α_i + c'_i α_i*. Requires ψ and
/// μ to vanish (relative tolerance `tol`); throws ValidationError otherwise
/// and NumericalError when the result is not diagonal to `tol`.
JointDiagonalization joint_diagonalize(const EquivariantPoint& a, Rng& rng, Real tol = 1e-9);

struct OrbitMatch {
  bool ok = false;
  /// orbits[m][γ] = index into the matched point list of Q(γ)·base_m
  std::vector<std::vector<int>> orbits;
  Real max_error = 0;
};

/// Greedy decomposition of a point multiset into Γ-orbits.
OrbitMatch match_orbits(const GroupData& data, const std::vector<Vec>& points, Real tol = 1e-7);

/// Max entry error between `points` and the orbit, up to permutation
/// (greedy nearest assignment).
Real orbit_distance(const GroupData& data, const EigenOrbit& orbit, const std::vector<Vec>& points);

struct HorizontalityReport {
  /// max |([ξ, α_k])_{γγ}| over ξ in a basis of Lie K^Γ
  Real max_diagonal = 0;
  /// max |g([ξ·α], δ)| over δ in a real basis of Δ^Γ
  Real max_inner = 0;
  bool vacuous = false;
};

/// Orbit tangents at a diagonal point are orthogonal to Δ^Γ.
HorizontalityReport horizontality_check(const GroupData& data, const EquivariantPoint& a, Real tol = 1e-12);

nlohmann::json to_json(const EigenOrbit& o);

}  // namespace orbmod
