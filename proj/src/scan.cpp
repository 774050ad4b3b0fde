#include "orbmod/scan.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "orbmod/defcplx.hpp"
#include "orbmod/parallel.hpp"
#include "orbmod/su3.hpp"
#include "orbmod/zero_fiber.hpp"

namespace orbmod {

std::vector<std::vector<Real>> zeta_grid(const GroupData& data, int bound) {
  if (bound < 0) throw ValidationError("ζ box bound must be nonnegative");
  const auto& blocks = data.centre().structure.blocks;
  const int m = static_cast<int>(blocks.size());
  std::vector<std::vector<Real>> out;
  std::vector<int> z(static_cast<size_t>(m), -bound);
  while (true) {
    long trace = 0;
    for (int i = 0; i < m; ++i) trace += static_cast<long>(z[i]) * blocks[i].irrep_dim * blocks[i].irrep_dim;
    if (trace == 0) out.emplace_back(z.begin(), z.end());
    int i = m - 1;
    while (i >= 0 && z[i] == bound) z[i--] = -bound;
    if (i < 0) break;
    ++z[i];
  }
  return out;
}

bool wall_free(const GroupData& data, const std::vector<Real>& zeta, Real tol) {
  const auto& blocks = data.centre().structure.blocks;
  const int m = static_cast<int>(blocks.size());
  if (m > 20) throw ValidationError("wall test limited to 20 isotypic blocks");
  Real scale = 0;
  for (Real z : zeta) scale = std::max(scale, std::abs(z));
  if (scale == 0) return false;
  for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
    Real s = 0;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) s += zeta[i] * blocks[i].irrep_dim * blocks[i].irrep_dim;
    if (std::abs(s) <= tol * scale) return false;
  }
  return true;
}

namespace {

Rng job_rng(std::uint64_t seed, int cell, int start) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(start)};
  return Rng(seq);
}

}  // namespace

void analyse_point(const GroupData& data, const ScanConfig& cfg, const EquivariantPoint& a, ModuliPointReport& rep) {
  const auto stab = stabilizer_info(data, a);
  if (!stab.ambiguous) rep.stabilizer_dim = stab.dim;
  const ComplexAtPoint cx = build_complex(data, a);
  rep.h01 = cx.h(1);
  if (data.n() >= 2) rep.h02 = cx.h(2);
  rep.jet_max = jet_report(data, cx, cfg.jet_tol).max_norm;
  if (data.n() == 3 && cx.h(1) == 3) rep.omega = omega_norm_coefficient(data, cx);
  const auto inv = git_invariants(a, cfg.invariant_degree);
  Real s = 0;
  for (const auto& v : inv) s += std::norm(v);
  rep.invariant_norm = std::sqrt(s);
  rep.invariant_count = static_cast<int>(inv.size());
  if (cfg.dump_tangent) {
    nlohmann::json t = nlohmann::json::array();
    for (int k = 0; k < cx.h(1); ++k) t.push_back(to_json(harmonic_element(data, cx, 1, Vec::Unit(cx.h(1), k))));
    rep.tangent = t;
  }
}

ScanResult scan_zeta(const ScanConfig& cfg) {
  if (cfg.starts < 0) throw ValidationError("starts must be nonnegative");
  const auto data = GroupData::load(cfg.group);
  const auto zetas = cfg.zetas ? *cfg.zetas : zeta_grid(*data, cfg.zeta_box);
  std::vector<CentralParameter> params;
  for (const auto& z : zetas) params.push_back(make_zeta(*data, z));
  // touch the lazily built bases before workers share them
  for (int q = 0; q <= data->n(); ++q) data->basis(0, q);

  const int per_cell = 2 * cfg.starts;
  const int jobs = static_cast<int>(zetas.size()) * per_cell;
  ScanResult res;
  res.points.resize(static_cast<size_t>(jobs));
  parallel_for(jobs, worker_count(cfg.threads), [&](int j) {
    const int cell = j / per_cell;
    const int start = j % per_cell;
    ModuliPointReport& rep = res.points[static_cast<size_t>(j)];
    rep.cell = cell;
    rep.start = start;
    rep.zeta = zetas[static_cast<size_t>(cell)];
    rep.generic = wall_free(*data, rep.zeta);
    const bool diagonal = start < cfg.starts;
    rep.kind = diagonal ? "diagonal" : "nilpotent";
    try {
      Rng rng = job_rng(cfg.seed, cell, start);
      EquivariantPoint a0;
      if (diagonal) {
        Vec lambda(data->n());
        for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda(i) = complex_normal(rng);
        a0 = diagonal_point(*data, make_orbit(*data, lambda));
      } else {
        // the first nilpotent start uses the canonical block order
        a0 = nilpotent_start(*data, rng, start > cfg.starts);
      }
      const FlowResult flow = kempf_ness_flow(*data, a0, params[static_cast<size_t>(cell)], cfg.flow);
      rep.status = to_string(flow.status);
      rep.mu_residual = flow.mu_residual;
      rep.psi_residual = flow.psi_residual;
      rep.iterations = flow.iterations;
      rep.norm = flow.alpha.norm();
      if (flow.status == FlowStatus::converged) analyse_point(*data, cfg, flow.alpha, rep);
    } catch (const NumericalError& e) {
      rep.status = "not-converged";
      rep.error = e.what();
    } catch (const std::exception& e) {
      rep.status = "error";
      rep.error = e.what();
    }
  });

  for (size_t c = 0; c < zetas.size(); ++c) {
    CellSummary s;
    s.cell = static_cast<int>(c);
    s.zeta = zetas[c];
    s.generic = wall_free(*data, s.zeta);
    bool jet_present = false;
    for (const auto& p : res.points) {
      if (p.cell != s.cell) continue;
      ++s.total;
      if (p.status != "converged") continue;
      ++s.converged;
      if (p.jet_max) {
        s.max_jet = std::max(s.max_jet, *p.jet_max);
        jet_present = jet_present || *p.jet_max > cfg.jet_tol;
      }
      if (p.omega) {
        s.omega_min = std::min(s.omega_min.value_or(*p.omega), *p.omega);
        s.omega_max = std::max(s.omega_max.value_or(*p.omega), *p.omega);
      }
    }
    s.verdict = s.converged == 0 ? "unstable-only" : jet_present ? "quadratic-jet-present" : "smooth-on-samples";
    res.cells.push_back(std::move(s));
  }
  return res;
}

nlohmann::json to_json(const ModuliPointReport& r) {
  nlohmann::json j{{"cell", r.cell},         {"start", r.start},   {"kind", r.kind},
                   {"zeta", r.zeta},         {"generic", r.generic}, {"status", r.status},
                   {"mu_residual", r.mu_residual}, {"psi_residual", r.psi_residual},
                   {"iterations", r.iterations},   {"norm", r.norm}};
  if (!r.error.empty()) j["error"] = r.error;
  if (r.stabilizer_dim) j["stabilizer_dim"] = *r.stabilizer_dim;
  if (r.h01) j["h01"] = *r.h01;
  if (r.h02) j["h02"] = *r.h02;
  if (r.jet_max) j["jet_max"] = *r.jet_max;
  if (r.omega) j["omega_coefficient"] = *r.omega;
  if (r.invariant_norm) {
    j["invariants"] = {{"count", r.invariant_count}, {"norm", *r.invariant_norm}};
  }
  if (!r.tangent.is_null()) j["tangent"] = r.tangent;
  return j;
}

namespace {
std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}
}  // namespace

void write_jsonl(std::ostream& os, const ScanResult& res) {
  const std::string ts = utc_now();
  for (const auto& p : res.points) {
    nlohmann::json j = to_json(p);
    j["timestamp"] = ts;
    os << j.dump() << '\n';
  }
}

void write_summary_csv(std::ostream& os, const ScanResult& res) {
  os << "cell,zeta,generic,converged,total,max_jet,omega_min,omega_max,verdict\n";
  os << std::setprecision(17);
  for (const auto& c : res.cells) {
    os << c.cell << ",\"";
    for (size_t i = 0; i < c.zeta.size(); ++i) os << (i ? "," : "") << c.zeta[i];
    os << "\"," << (c.generic ? "true" : "false") << ',' << c.converged << ',' << c.total << ',' << c.max_jet << ',';
    if (c.omega_min) os << *c.omega_min;
    os << ',';
    if (c.omega_max) os << *c.omega_max;
    os << ',' << c.verdict << '\n';
  }
}

std::string strip_timestamps(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    j.erase("timestamp");
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace orbmod
