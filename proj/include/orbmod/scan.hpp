#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "orbmod/moment.hpp"

namespace orbmod {

struct ScanConfig {
  std::string group = "1/3(1,1,1)";
  /// Explicit ζ list; when absent the integer box [−B, B]^N ∩ {trace 0} is used.
  std::optional<std::vector<std::vector<Real>>> zetas;
  int zeta_box = 2;
  /// k diagonal-orbit starts and k nilpotent starts per cell
  int starts = 4;
  std::uint64_t seed = 0;
  FlowOptions flow;
  Real jet_tol = 1e-8;
  int invariant_degree = 3;
  bool dump_tangent = false;
  int threads = 0;
};

/// Integer ζ with entries in [−B, B] and Σ z_i d_i² = 0, lexicographic.
std::vector<std::vector<Real>> zeta_grid(const GroupData& data, int bound);

/// No proper nonempty set of isotypic blocks has Σ z_i d_i² = 0 (a
/// necessary condition for avoiding the walls of subrepresentations; a
/// heuristic, not a chamber decomposition).
bool wall_free(const GroupData& data, const std::vector<Real>& zeta, Real tol = 1e-12);

struct ModuliPointReport {
  int cell = 0;
  int start = 0;
  std::string kind;
  std::vector<Real> zeta;
  bool generic = false;
  std::string status;
  std::string error;
  Real mu_residual = 0, psi_residual = 0, norm = 0;
  int iterations = 0;
  std::optional<int> stabilizer_dim;
  std::optional<int> h01, h02;
  std::optional<Real> jet_max;
  std::optional<Real> omega;
  /// ‖(trace monomials up to the configured degree)‖₂ and their count
  std::optional<Real> invariant_norm;
  int invariant_count = 0;
  nlohmann::json tangent;
};

/// Fills the stabilizer, tangent, jet, Ω and invariant fields of `rep` for
/// a point of the moduli space.
void analyse_point(const GroupData& data, const ScanConfig& cfg, const EquivariantPoint& a, ModuliPointReport& rep);

struct CellSummary {
  int cell = 0;
  std::vector<Real> zeta;
  bool generic = false;
  int converged = 0;
  int total = 0;
  Real max_jet = 0;
  std::optional<Real> omega_min, omega_max;
  /// smooth-on-samples | quadratic-jet-present | unstable-only
  std::string verdict;
};

struct ScanResult {
  std::vector<ModuliPointReport> points;
  std::vector<CellSummary> cells;
};

/// Runs every (cell, start) job; per-job RNG streams are derived from
/// (seed, cell, start), so the result does not depend on scheduling.
ScanResult scan_zeta(const ScanConfig& cfg);

nlohmann::json to_json(const ModuliPointReport& r);
/// One report per line, each with a "timestamp" field.
void write_jsonl(std::ostream& os, const ScanResult& res);
void write_summary_csv(std::ostream& os, const ScanResult& res);

/// The JSON Lines text with every "timestamp" field removed.
std::string strip_timestamps(const std::string& jsonl);

}  // namespace orbmod
