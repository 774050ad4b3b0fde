#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "orbmod/defcplx.hpp"
#include "orbmod/moment.hpp"

namespace orbmod {

/// Orthogonal projector (in M^{0,1,Γ} coordinates) onto the horizontal
/// space: the complement of the complexified orbit tangent inside ker ∂̄_α,
/// i.e. the harmonic space H^{0,1,Γ}_α.
const Mat& horizontal_projector(const ComplexAtPoint& cx);

/// g_ζ(u, v) after horizontal projection. ValidationError when the K^Γ
/// stabilizer of α is nontrivial or u, v are not invariant (0,1)-forms.
Real quotient_metric(const GroupData& data, const ComplexAtPoint& cx, const GradedElement& u, const GradedElement& v);

/// Real frame {u_1, i·u_1, …, u_n, i·u_n} with u_i = k·δ_i·k⁻¹, δ_i the
/// diagonal point over the basis vector e_i (the Δ^Γ frame carried along
/// the flow).
std::vector<GradedElement> transported_frame(const GroupData& data, const Mat& k, const Mat& k_inv);

/// Real 2n×2n matrix g(P u_a, P u_b)/‖δ‖², which is the identity on the flat
/// cone Δ^Γ.
RMat metric_matrix(const GroupData& data, const ComplexAtPoint& cx, const std::vector<GradedElement>& frame);

struct MetricSample {
  Real radius = 0;
  FlowStatus status = FlowStatus::plateau;
  int iterations = 0;
  RMat g;
  Real deviation = 0;
  /// ‖g via level ζ/R² at θ − g via level ζ at Rθ‖_F
  std::optional<Real> self_test;
  std::string error;

  bool ok() const { return error.empty() && status == FlowStatus::converged; }
};

struct AleOptions {
  FlowOptions flow{.tol = 1e-12};
  bool self_test = true;
  int threads = 0;
};

struct AleReport {
  std::vector<Real> zeta;
  Vec theta;
  std::vector<MetricSample> samples;
  /// Least-squares fit of log(deviation) against log(radius); absent when
  /// fewer than two samples have a measurable deviation (e.g. ζ = 0).
  std::optional<Real> slope, intercept, r_squared;
  bool monotone = false;
  Real max_self_test = 0;
};

/// Metric of X_ζ along the ray through θ, using g_ζ(R, θ) = g_{ζ/R²}(1, θ).
/// θ is normalised and must have a free orbit.
AleReport ale_decay_probe(const GroupData& data, const std::vector<Real>& zeta, const Vec& theta,
                          const std::vector<Real>& radii, const AleOptions& opts = {});

nlohmann::json to_json(const AleReport& rep);
void write_csv(std::ostream& os, const AleReport& rep);

}  // namespace orbmod
