#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "orbmod/types.hpp"

namespace orbmod {

/// Strictly increasing, 0-based.
using MultiIndex = std::vector<int>;

/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<MultiIndex> combinations(int n, int k);

/// Sign of the permutation sorting `seq`, or 0 when `seq` repeats an index.
/// `sorted` receives the sorted sequence.
int wedge_sign(const std::vector<int>& seq, MultiIndex& sorted);

/// An element of M^{p,q} = Ω^{p,q} ⊗ End R,
///   β = Σ β^I_J̄ dq_I ∧ dq̄^J,
/// one r×r coefficient per pair of sorted multi-indices (|I| = p, |J| = q).
///
/// Coefficients are laid out densely: block index = iI·C(n,q) + iJ with iI,
/// iJ the lexicographic positions of I and J.
class GradedElement {
 public:
  GradedElement() = default;
  GradedElement(int n, int r, int p, int q);

  int n() const { return n_; }
  int r() const { return r_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int degree() const { return p_ + q_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }

  const std::vector<MultiIndex>& holo_indices() const { return holo_; }
  const std::vector<MultiIndex>& antiholo_indices() const { return antiholo_; }

  Mat& block(int k) { return blocks_[static_cast<size_t>(k)]; }
  const Mat& block(int k) const { return blocks_[static_cast<size_t>(k)]; }
  int block_index(const MultiIndex& holo, const MultiIndex& antiholo) const;
  std::pair<MultiIndex, MultiIndex> indices_of(int k) const;

  Mat& at(const MultiIndex& holo, const MultiIndex& antiholo);
  const Mat& at(const MultiIndex& holo, const MultiIndex& antiholo) const;

  /// Coefficient of an arbitrary (possibly unsorted) index sequence,
  /// antisymmetrically extended; zero on repeated indices.
  Mat signed_at(const std::vector<int>& holo, const std::vector<int>& antiholo) const;

  bool same_shape(const GradedElement& o) const {
    return n_ == o.n_ && r_ == o.r_ && p_ == o.p_ && q_ == o.q_;
  }

  GradedElement& operator+=(const GradedElement& o);
  GradedElement& operator-=(const GradedElement& o);
  GradedElement& operator*=(Complex s);

  /// Σ_blocks ‖β^I_J‖²_F (no form-factor weighting)
  Real coefficient_norm2() const;

 private:
  int n_ = 0, r_ = 0, p_ = 0, q_ = 0;
  std::vector<MultiIndex> holo_, antiholo_;
  std::vector<Mat> blocks_;
};

GradedElement operator+(GradedElement a, const GradedElement& b);
GradedElement operator-(GradedElement a, const GradedElement& b);
GradedElement operator*(Complex s, GradedElement a);

/// Form factor making {dq_I ∧ dq̄^J / √(2^{p+q})} orthonormal: ‖dq_I∧dq̄^J‖² = 2^{p+q}.
Real form_factor(int p, int q);

/// Wedge product of matrix-valued forms, with matrix multiplication on the
/// coefficients.
GradedElement product(const GradedElement& x, const GradedElement& y);

/// [x, y] = xy − (−1)^{deg x · deg y} yx
GradedElement bracket(const GradedElement& x, const GradedElement& y);

/// x* = (x^I_J)* dq̄^I ∧ dq_J, an element of M^{q,p}.
GradedElement adjoint(const GradedElement& x);

/// Contraction Λ with the Kähler form ω = Σ dq_i ∧ dq̄^i, M^{p,q} → M^{p−1,q−1},
/// normalised so that Λ(ω·S) = n·S.
GradedElement contract_kahler(const GradedElement& x);

/// ω ⊗ S in M^{1,1}.
GradedElement kahler_form(int n, const Mat& s);

struct InnerProducts {
  Complex h;
  Real g = 0;
  Real omega = 0;
};

/// h(x, y) = 2^{p+q} Σ_{I,J} trace(x^I_J (y^I_J)*),  g = Re h,  ω = Im h.
InnerProducts inner_products(const GradedElement& x, const GradedElement& y);
Complex hermitian_product(const GradedElement& x, const GradedElement& y);
Real norm(const GradedElement& x);

/// Coordinates in which h is the standard Hermitian product:
/// h(x, y) = to_vector(y)^H to_vector(x).
Vec to_vector(const GradedElement& x);
GradedElement from_vector(const Vec& v, int n, int r, int p, int q);
/// Length of to_vector for this shape.
Eigen::Index vector_size(int n, int r, int p, int q);

/// Index strings use 1-based indices, e.g. "1,2|3" for dq_1∧dq_2∧dq̄^3 and "|1" for dq̄^1.
std::string index_key(const MultiIndex& holo, const MultiIndex& antiholo);
nlohmann::json to_json(const GradedElement& x);
GradedElement graded_from_json(const nlohmann::json& j);

}  // namespace orbmod
