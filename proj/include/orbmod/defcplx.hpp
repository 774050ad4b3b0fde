#pragma once

#include <vector>

#include "json.hpp"
#include "orbmod/equivariant.hpp"

namespace orbmod {

/// Matrix of β ↦ [x, β] from M^{p,q,Γ} to M^{p+x.p, q+x.q, Γ} in the
/// orthonormal invariant bases. x must be Γ-invariant.
Mat bracket_operator(const GroupData& data, const GradedElement& x, int p, int q);

/// ∂̄_α : M^{p,q,Γ} → M^{p,q+1,Γ}, β ↦ [α, β]
Mat dbar_operator(const GroupData& data, const EquivariantPoint& a, int p, int q);

/// (Σ_j [α_j*, β^I_{jJ}]) dq_I ∧ dq̄^J, the coordinate expression of the
/// contraction Λ[α*, β]. The h-adjoint of ∂̄_α is twice this.
GradedElement dstar_coordinate(const EquivariantPoint& a, const GradedElement& beta);

struct HarmonicSpace {
  int p = 0, q = 0;
  /// Orthonormal columns in the coordinates of M^{p,q,Γ}.
  Mat basis;
  Mat projector;
  RVec laplacian_eigenvalues;
  Real threshold = 0;
  /// smallest nonzero eigenvalue / largest eigenvalue counted as zero
  /// (infinite when either side is empty)
  Real gap_ratio = 0;

  int dim() const { return static_cast<int>(basis.cols()); }
};

/// The complex M^{p,0,Γ} → … → M^{p,n,Γ} with differential ∂̄_α.
struct ComplexAtPoint {
  EquivariantPoint alpha;
  int p = 0;
  std::vector<int> dims;
  /// dbar[q]: M^{p,q,Γ} → M^{p,q+1,Γ}, q = 0..n−1; the adjoint is dbar[q]^H.
  std::vector<Mat> dbar;
  std::vector<int> ranks;
  std::vector<HarmonicSpace> harmonic;
  /// Kernel threshold shared by ranks and Laplacians: 1e-8·max(λ_max, 1e-12)
  /// with λ_max the largest Laplacian eigenvalue in the complex.
  Real threshold = 0;
  /// max_q ‖∂̄^{q+1}∂̄^q‖
  Real dbar_squared = 0;

  int h(int q) const { return harmonic[static_cast<size_t>(q)].dim(); }
  /// dim M^{p,q,Γ} − rank ∂̄^{q−1} − rank ∂̄^q − dim H^{p,q}, per q
  std::vector<int> hodge_defects() const;
};

ComplexAtPoint build_complex(const GroupData& data, const EquivariantPoint& a, int p = 0);

GradedElement harmonic_element(const GroupData& data, const ComplexAtPoint& cx, int q, const Vec& coeffs);
/// Orthogonal projection H_α onto the harmonic space.
GradedElement harmonic_project(const GroupData& data, const ComplexAtPoint& cx, const GradedElement& x);

/// Φ₍₂₎(β) = H_α([β, β]); β must be a harmonic (0,1) element (ValidationError
/// otherwise).
GradedElement kuranishi_two_jet(const GroupData& data, const ComplexAtPoint& cx, const GradedElement& beta,
                                Real tol = 1e-8);

struct JetReport {
  /// max ‖Φ₍₂₎(β)‖ over unit β ∈ {b_i, (b_i+b_j)/√2, (b_i+i·b_j)/√2}; by
  /// polarization this vanishes iff Φ₍₂₎ ≡ 0 on H^{0,1,Γ}.
  Real max_norm = 0;
  int samples = 0;
  bool vanishes = true;
};

JetReport jet_report(const GroupData& data, const ComplexAtPoint& cx, Real tol = 1e-8);

struct ZariskiCheck {
  /// real dimension of ker dψ ∩ ker dμ on M^{0,1,Γ}
  int kernel_dim = 0;
  /// real dimension of the K^Γ orbit
  int orbit_dim = 0;
  int h01 = 0;
  bool consistent = false;
};

ZariskiCheck zariski_tangent_check(const GroupData& data, const ComplexAtPoint& cx);

nlohmann::json to_json(const ComplexAtPoint& cx);
nlohmann::json to_json(const JetReport& j);

}  // namespace orbmod
