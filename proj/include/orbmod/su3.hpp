#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "orbmod/defcplx.hpp"

namespace orbmod {

/// Factor turning |Σ ε_ijk trace(η_i β_j δ_k)|² into the coefficient of
/// κ∧κ* as normalised in the worked μ₃ example.
inline constexpr Real kOmegaNormalization = 4.0;

/// Three h-orthonormal harmonic (0,1) elements at a point.
struct TangentFrame {
  EquivariantPoint alpha;
  std::vector<GradedElement> elements;
  /// ‖Gram − I‖_F
  Real gram_residual = 0;
};

/// Orthonormal frame of H^{0,1,Γ}_α; ValidationError unless n = 3 and the
/// harmonic space is 3-dimensional.
TangentFrame tangent_frame(const GroupData& data, const ComplexAtPoint& cx);

/// Ω(η,β,δ) = κ-coefficient of trace(η∧β∧δ) = Σ ε_ijk trace(η_i β_j δ_k).
Complex omega_form(const GradedElement& eta, const GradedElement& beta, const GradedElement& delta);
/// C(β) = κ-coefficient of trace(β∧[β,β]).
Complex cubic_form(const GradedElement& beta);
/// κ-coefficient of trace(η ∧ H_α([β,δ])).
Complex symmetric_tensor(const GroupData& data, const ComplexAtPoint& cx, const GradedElement& eta,
                         const GradedElement& beta, const GradedElement& delta);

Real omega_norm_coefficient(const TangentFrame& frame);
Real omega_norm_coefficient(const GroupData& data, const ComplexAtPoint& cx);
Real omega_norm_coefficient(const GroupData& data, const EquivariantPoint& a);

struct RicciProbe {
  std::vector<Real> values;
  Real min = 0, max = 0, spread = 0;
  std::string verdict;
};

/// "not Ricci-flat" when spread > tol·max, else "constant-on-samples".
RicciProbe ricci_flat_probe(const std::vector<Real>& values, Real tol = 1e-9);
RicciProbe ricci_flat_probe(const GroupData& data, const std::vector<EquivariantPoint>& points, Real tol = 1e-9);

/// Worked μ₃ configurations for 1/3(1,1,1), entries given in the character
/// basis: α₁ = A·E₀₁ + B·E₁₂ and α₁ = (A+C)·E₀₁ + (B+C)·E₁₂ + C·E₂₀, α₂ = α₃ = 0.
EquivariantPoint point1(const GroupData& data, Real a, Real b);
EquivariantPoint point2(const GroupData& data, Real a, Real b, Real c);

/// ½(AB/(A²+B²))²
Real point1_reference(Real a, Real b);

nlohmann::json to_json(const RicciProbe& p);

}  // namespace orbmod
