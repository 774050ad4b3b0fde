#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orbmod/types.hpp"

namespace orbmod {

struct GroupOptions {
  int order_cap = 64;
  /// Tolerance for unitarity of user-supplied generators and for matching
  /// group elements during closure.
  Real tol = 1e-9;
  /// An eigenvalue of Q(g) counts as 1 when |λ − 1| < freeness_tol.
  Real freeness_tol = 1e-8;
};

/// A finite group Γ together with a unitary representation Q on C^n.
///
/// Elements are indexed 0..r-1 with 0 the identity; for cyclic specs
/// element k is g^k, for generator specs the generators follow the
/// identity in spec order and the rest appear in closure order.
struct FiniteGroupAction {
  int order = 0;
  int dim = 0;
  /// cayley[a][b] = index of a·b
  std::vector<std::vector<int>> cayley;
  std::vector<int> inverse;
  std::vector<Mat> q;
  /// Present for `1/r(a_1,...,a_n)` specs.
  std::optional<std::vector<int>> weights;
  bool free_outside_origin = false;
  std::vector<std::vector<int>> classes;
  std::string spec;

  int class_count() const { return static_cast<int>(classes.size()); }
  bool is_abelian() const;
  int mul(int a, int b) const { return cayley[a][b]; }
};

/// φ(γ) e_δ = e_{γδ}
struct RegularRep {
  std::vector<Mat> phi;
};

struct IsotypicBlock {
  /// Dimension of the irreducible representation; the block has rank d².
  int irrep_dim = 1;
  Mat projector;
};

struct IsotypicStructure {
  std::vector<IsotypicBlock> blocks;
};

/// Isotypic blocks of R plus a real basis of the centre of su^Γ(R), stored
/// as Hermitian traceless matrices (the Lie algebra element is i times it).
struct IsotypicCentre {
  IsotypicStructure structure;
  std::vector<Mat> centre_basis;
  /// Unitary whose columns diagonalise R block by block (abelian groups
  /// only: column j spans block j).
  std::optional<Mat> character_basis;
};

/// Parse and validate a group spec: either the cyclic shortcut
/// `1/r(a_1,...,a_n)` or a JSON object `{"generators": [...]}` whose
/// entries are n×n matrices written as rows of [re, im] pairs.
FiniteGroupAction build_group(std::string_view spec, const GroupOptions& opts = {});

RegularRep regular_rep(const FiniteGroupAction& g);

IsotypicCentre isotypic_centre(const FiniteGroupAction& g, const RegularRep& reg);

/// max_{g,h} ‖Q[g]Q[h] − Q[gh]‖_F
Real homomorphism_residual(const FiniteGroupAction& g);
/// max_g ‖Q[g]*Q[g] − I‖_F
Real unitarity_residual(const FiniteGroupAction& g);
/// max_{g,h} ‖φ[g]φ[h] − φ[gh]‖_F
Real homomorphism_residual(const FiniteGroupAction& g, const RegularRep& reg);

struct ProjectorResiduals {
  Real idempotent = 0;
  Real hermitian = 0;
  Real orthogonal = 0;
  Real complete = 0;
  Real commutes = 0;
  Real max() const;
};
ProjectorResiduals projector_residuals(const IsotypicStructure& iso, const RegularRep& reg);

}  // namespace orbmod
