#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string_view>
#include <vector>

#include "orbmod/graded.hpp"
#include "orbmod/group.hpp"
#include "orbmod/types.hpp"

namespace orbmod {

using Rng = std::mt19937_64;

Complex complex_normal(Rng& rng);

/// e^{s·H} for Hermitian H (complex s allowed: s = i gives a unitary).
Mat exp_hermitian(const Mat& h, Complex s);

/// Orthonormal basis of the Γ-invariant subspace of M^{p,q}, as columns in
/// the `to_vector` coordinates (so orthonormal for the form-weighted h).
struct MGammaBasis {
  int n = 0, r = 0, p = 0, q = 0;
  Mat vectors;
  /// Smallest averaging-projector eigenvalue counted as 1 and largest counted
  /// as 0; a clean split is (≈1, ≈0).
  Real kept_min = 1.0, dropped_max = 0.0;

  int dim() const { return static_cast<int>(vectors.cols()); }
  GradedElement element(int k) const;
  GradedElement combine(const Vec& coeffs) const;
  /// Coordinates of x in this basis (orthogonal projection if x is not invariant).
  Vec coordinates(const GradedElement& x) const;
};

/// Immutable bundle of a group, its regular representation and isotypic
/// data, with lazily computed invariant bases. Safe to share across threads.
class GroupData {
 public:
  explicit GroupData(FiniteGroupAction g);
  static std::shared_ptr<const GroupData> load(std::string_view spec, const GroupOptions& opts = {});

  const FiniteGroupAction& group() const { return group_; }
  const RegularRep& regular() const { return regular_; }
  const IsotypicCentre& centre() const { return centre_; }
  int n() const { return group_.dim; }
  int r() const { return group_.order; }

  const MGammaBasis& basis(int p, int q) const;
  /// Real orthonormal basis (for Re trace(XY*)) of pu^Γ(R): anti-Hermitian
  /// elements of End^Γ R orthogonal to the scalars.
  const std::vector<Mat>& pu_basis() const { return pu_basis_; }

 private:
  FiniteGroupAction group_;
  RegularRep regular_;
  IsotypicCentre centre_;
  std::vector<Mat> pu_basis_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::unique_ptr<MGammaBasis>> bases_;
};

using GroupHandle = std::shared_ptr<const GroupData>;

/// α ∈ M^Γ as its components α_1..α_n (r×r each).
struct EquivariantPoint {
  std::vector<Mat> components;
  Real equivariance_residual = 0;

  int n() const { return static_cast<int>(components.size()); }
  int r() const { return components.empty() ? 0 : static_cast<int>(components.front().rows()); }
  Real norm() const { return tuple_norm(components); }
};

/// max over γ, k of ‖Σ_l Q(γ)_{kl} φ(γ) α_l φ(γ)^{-1} − α_k‖_F
Real equivariance_residual(const GroupData& data, const std::vector<Mat>& components);

/// Validate shape and equivariance (relative tolerance) and wrap.
EquivariantPoint make_point(const GroupData& data, std::vector<Mat> components, Real tol = 1e-8);

EquivariantPoint zero_point(const GroupData& data);

/// α as the (0,1)-form Σ α_k dq̄^k.
GradedElement as_form(const EquivariantPoint& a);
EquivariantPoint as_point(const GroupData& data, const GradedElement& x);

/// γ·β for β ∈ M^{p,q}: coefficients of dq̄^J transform by Λ^q Q(γ), of dq_I
/// by Λ^p conj Q(γ), and End R by conjugation with φ(γ).
GradedElement act(const GroupData& data, int gamma, const GradedElement& x);

MGammaBasis mgamma_basis(const GroupData& data, int p, int q);

/// Random element of M^Γ with standard complex normal coordinates in the
/// invariant basis.
EquivariantPoint random_point(const GroupData& data, Rng& rng, Real scale = 1.0);

/// Random element of K^Γ (unitary, commuting with every φ(γ)).
Mat random_commutant_unitary(const GroupData& data, Rng& rng, Real scale = 1.0);

/// Matrices of the Γ-commutant End^Γ R (orthonormal for trace(XY*)).
std::vector<Mat> commutant_basis(const GroupData& data);

/// Average of φ(γ) X φ(γ)^{-1}: orthogonal projection onto End^Γ R.
Mat project_commutant(const GroupData& data, const Mat& x);

}  // namespace orbmod
