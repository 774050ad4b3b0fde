#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "orbmod/equivariant.hpp"

namespace orbmod {

/// ζ in the centre of su^Γ(R): one real coefficient per isotypic block,
/// assembled as Z = Σ z_i P_i (Hermitian; the Lie algebra element is iZ).
struct CentralParameter {
  std::vector<Real> coefficients;
  Mat matrix;

  bool is_zero() const;
};

/// Validates the block count and Σ z_i d_i² = 0 (relative tolerance).
CentralParameter make_zeta(const GroupData& data, const std::vector<Real>& coefficients, Real tol = 1e-9);
CentralParameter zero_zeta(const GroupData& data);

/// Comma-separated list; entries may be decimals or rationals "p/q".
std::vector<Real> parse_zeta(std::string_view text);

/// ψ(α) ∈ M^{0,2}: coefficient at (i<j) is [α_i, α_j].
GradedElement psi(const EquivariantPoint& a);
/// (Σ_{i<j} ‖[α_i, α_j]‖²_F)^{1/2}, no form-factor weighting.
Real psi_residual(const EquivariantPoint& a);

/// μ(α) = Σ_k [α_k*, α_k]
Mat mu(const EquivariantPoint& a);
Mat mu(const std::vector<Mat>& components);

/// Derivative of μ along the infinitesimal G^Γ action α ↦ [H, α].
Mat mu_derivative(const std::vector<Mat>& components, const Mat& h);

/// T_ij = trace(α_i α_j*)
Mat mu_prime(const EquivariantPoint& a);

/// trace(α_{w_1}···α_{w_k}) over all words with 1 ≤ k ≤ max_degree, ordered
/// by length and then lexicographically.
std::vector<Complex> git_invariants(const EquivariantPoint& a, int max_degree);

struct StabilizerInfo {
  int dim = 0;
  std::vector<Real> singular_values;
  Real threshold = 0;
  /// Some singular value lies in (threshold, 1e3·threshold].
  bool ambiguous = false;
};

/// Kernel of ξ ↦ ([ξ, α_k])_k on pu^Γ, via an SVD of the real linear map.
StabilizerInfo stabilizer_info(const GroupData& data, const EquivariantPoint& a);
/// Throws NumericalError when the kernel threshold is ambiguous.
int stabilizer_dim(const GroupData& data, const EquivariantPoint& a);

enum class FlowStatus { converged, diverged, plateau };
std::string to_string(FlowStatus s);

struct FlowOptions {
  Real tol = 1e-10;
  int max_iter = 20000;
  Real armijo = 1e-4;
  Real backtrack = 0.5;
  int plateau_window = 200;
  Real plateau_decrease = 1e-14;
  Real divergence_factor = 1e6;
  /// At ζ = 0, an iterate with ‖α‖ ≤ origin_snap·‖α0‖ is replaced by 0.
  Real origin_snap = 1e-4;
  bool record_history = false;
};

struct FlowResult {
  EquivariantPoint alpha;
  Real mu_residual = 0;
  Real psi_residual = 0;
  /// max ψ residual over all accepted iterates
  Real psi_drift = 0;
  int iterations = 0;
  FlowStatus status = FlowStatus::plateau;
  /// α = k·α0·k⁻¹ with k ∈ G^Γ; log_norm = ½‖log(k*k)‖_F.
  Mat k, k_inv;
  Real log_norm = 0;
  bool snapped_to_origin = false;
  std::vector<Real> residual_history;
};

/// Steepest descent of ½‖μ − Z‖² inside the G^Γ orbit:
/// α ← e^{sH} α e^{−sH}, H = μ(α) − Z projected to End^Γ R, with Armijo
/// backtracking. Throws ValidationError when ψ(α0) is not (relatively)
/// small and NumericalError when the iteration cap is reached unclassified.
FlowResult kempf_ness_flow(const GroupData& data, const EquivariantPoint& start, const CentralParameter& zeta,
                           const FlowOptions& opts = {});

/// Nilpotent start for cyclic groups: pick a weight w, fill the entries of
/// the character-basis sparsity pattern for w that are strictly upper in
/// a block order with seeded normals, and set α_k = c_k X for the components
/// of weight w. The canonical order is 0 < 1 < … < r−1.
EquivariantPoint nilpotent_start(const GroupData& data, Rng& rng, bool random_order = false);

/// Map a matrix given in the character basis to the e_γ basis.
Mat from_character_basis(const GroupData& data, const Mat& x);
Mat to_character_basis(const GroupData& data, const Mat& x);

nlohmann::json to_json(const CentralParameter& z);
nlohmann::json to_json(const FlowResult& f, bool dump_alpha = false);
nlohmann::json matrices_to_json(const std::vector<Mat>& ms);

}  // namespace orbmod
