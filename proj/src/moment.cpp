#include "orbmod/moment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace orbmod {

bool CentralParameter::is_zero() const {
  return std::all_of(coefficients.begin(), coefficients.end(), [](Real z) { return z == 0.0; });
}

CentralParameter make_zeta(const GroupData& data, const std::vector<Real>& coefficients, Real tol) {
  const auto& blocks = data.centre().structure.blocks;
  if (coefficients.size() != blocks.size())
    throw ValidationError("ζ needs " + std::to_string(blocks.size()) + " coefficients (one per isotypic block), got " +
                          std::to_string(coefficients.size()));
  Real trace = 0, scale = 0;
  CentralParameter z{coefficients, Mat::Zero(data.r(), data.r())};
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (!std::isfinite(coefficients[i])) throw ValidationError("ζ coefficients must be finite");
    const Real d2 = static_cast<Real>(blocks[i].irrep_dim) * blocks[i].irrep_dim;
    trace += coefficients[i] * d2;
    scale += std::abs(coefficients[i]) * d2;
    z.matrix += coefficients[i] * blocks[i].projector;
  }
  if (std::abs(trace) > tol * std::max(1.0, scale))
    throw ValidationError("ζ is not trace-free: Σ z_i d_i² = " + std::to_string(trace));
  z.matrix = 0.5 * (z.matrix + z.matrix.adjoint()).eval();
  return z;
}

CentralParameter zero_zeta(const GroupData& data) {
  return make_zeta(data, std::vector<Real>(data.centre().structure.blocks.size(), 0.0));
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

Real parse_number(const std::string& s) {
  std::size_t used = 0;
  Real v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse '" + s + "' as a number");
  }
  if (used != s.size()) throw ValidationError("cannot parse '" + s + "' as a number");
  return v;
}

}  // namespace

std::vector<Real> parse_zeta(std::string_view text) {
  std::vector<Real> out;
  std::string s = trim(text);
  if (s.empty()) return out;
  if (s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    const std::string tok = trim(std::string_view(s).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (tok.empty()) throw ValidationError("empty entry in ζ list '" + std::string(text) + "'");
    const auto slash = tok.find('/');
    if (slash == std::string::npos) {
      out.push_back(parse_number(tok));
    } else {
      const Real num = parse_number(trim(std::string_view(tok).substr(0, slash)));
      const Real den = parse_number(trim(std::string_view(tok).substr(slash + 1)));
      if (den == 0) throw ValidationError("zero denominator in ζ entry '" + tok + "'");
      out.push_back(num / den);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

GradedElement psi(const EquivariantPoint& a) {
  GradedElement x(a.n(), a.r(), 0, 2);
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j) x.at({}, {i, j}) = commutator(a.components[i], a.components[j]);
  return x;
}

Real psi_residual(const EquivariantPoint& a) {
  Real s = 0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j) s += commutator(a.components[i], a.components[j]).squaredNorm();
  return std::sqrt(s);
}

Mat mu(const std::vector<Mat>& components) {
  if (components.empty()) return {};
  const auto r = components.front().rows();
  Mat m = Mat::Zero(r, r);
  for (const auto& c : components) m += c.adjoint() * c - c * c.adjoint();
  return m;
}

Mat mu(const EquivariantPoint& a) { return mu(a.components); }

Mat mu_derivative(const std::vector<Mat>& components, const Mat& h) {
  const auto r = h.rows();
  Mat d = Mat::Zero(r, r);
  for (const auto& a : components) {
    const Mat c = commutator(h, a);
    d += commutator(c.adjoint(), a) + commutator(a.adjoint(), c);
  }
  return d;
}

Mat mu_prime(const EquivariantPoint& a) {
  const int n = a.n();
  Mat t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = (a.components[i] * a.components[j].adjoint()).trace();
  return t;
}

std::vector<Complex> git_invariants(const EquivariantPoint& a, int max_degree) {
  std::vector<Complex> out;
  if (a.n() == 0) return out;
  // products of all words of the previous length, extended letter by letter
  std::vector<Mat> level{Mat::Identity(a.r(), a.r())};
  for (int len = 1; len <= max_degree; ++len) {
    std::vector<Mat> next;
    next.reserve(level.size() * static_cast<size_t>(a.n()));
    for (const auto& w : level)
      for (const auto& c : a.components) {
        next.push_back(w * c);
        out.push_back(next.back().trace());
      }
    level = std::move(next);
  }
  return out;
}

StabilizerInfo stabilizer_info(const GroupData& data, const EquivariantPoint& a) {
  const auto& basis = data.pu_basis();
  StabilizerInfo info;
  if (basis.empty()) return info;
  const Eigen::Index rr = static_cast<Eigen::Index>(a.r()) * a.r();
  RMat m(2 * rr * a.n(), static_cast<Eigen::Index>(basis.size()));
  for (size_t col = 0; col < basis.size(); ++col) {
    Eigen::Index row = 0;
    for (const auto& c : a.components) {
      const Mat b = commutator(basis[col], c);
      for (Eigen::Index k = 0; k < rr; ++k) {
        m(row++, static_cast<Eigen::Index>(col)) = b.data()[k].real();
        m(row++, static_cast<Eigen::Index>(col)) = b.data()[k].imag();
      }
    }
  }
  Eigen::JacobiSVD<RMat> svd(m);
  const RVec sv = svd.singularValues();
  info.singular_values.assign(sv.data(), sv.data() + sv.size());
  // ‖[ξ, α]‖ ≤ 2‖α‖ for unit ξ, so ‖α‖ sets the scale
  info.threshold = 1e-8 * a.norm() + 1e-14;
  // the SVD returns min(rows, cols) values; extra columns are kernel directions
  info.dim = static_cast<int>(basis.size()) - static_cast<int>(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= info.threshold)
      ++info.dim;
    else if (sv(i) <= 1e3 * info.threshold)
      info.ambiguous = true;
  }
  return info;
}

int stabilizer_dim(const GroupData& data, const EquivariantPoint& a) {
  const auto info = stabilizer_info(data, a);
  if (info.ambiguous) throw NumericalError("stabilizer dimension ambiguous at the kernel threshold");
  return info.dim;
}

std::string to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::converged: return "converged";
    case FlowStatus::diverged: return "diverged";
    case FlowStatus::plateau: return "plateau";
  }
  return "unknown";
}

namespace {

Real objective(const std::vector<Mat>& comps, const Mat& z) { return 0.5 * (mu(comps) - z).squaredNorm(); }

Real log_norm(const Mat& k) {
  Eigen::SelfAdjointEigenSolver<Mat> es(k.adjoint() * k);
  return 0.5 * es.eigenvalues().array().max(1e-300).log().matrix().norm();
}

}  // namespace

FlowResult kempf_ness_flow(const GroupData& data, const EquivariantPoint& start, const CentralParameter& zeta,
                           const FlowOptions& opts) {
  if (start.n() != data.n() || start.r() != data.r()) throw ValidationError("start point has the wrong shape");
  if (zeta.matrix.rows() != data.r()) throw ValidationError("ζ does not match the group");
  const Real n0 = start.norm();
  const Real psi0 = psi_residual(start);
  if (psi0 > opts.tol * std::max(1.0, n0 * n0))
    throw ValidationError("flow start is not in the commuting variety (ψ residual " + std::to_string(psi0) + ")");

  const int r = data.r();
  const Mat& z = zeta.matrix;
  const Real plateau_tol = opts.plateau_decrease * std::max(1.0, z.norm());
  const bool zeta_zero = zeta.is_zero();

  FlowResult res;
  res.alpha = start;
  res.k = Mat::Identity(r, r);
  res.k_inv = Mat::Identity(r, r);
  res.psi_drift = psi0;
  std::vector<Mat>& comps = res.alpha.components;

  Mat m = mu(comps);
  Real f = 0.5 * (m - z).squaredNorm();
  std::vector<Real> window;  // residuals, newest last
  Real step = 1.0 / (2.0 * n0 * n0 + 1e-12);

  auto finish = [&](FlowStatus s) {
    res.status = s;
    res.mu_residual = (mu(comps) - z).norm();
    res.psi_residual = psi_residual(res.alpha);
    res.alpha.equivariance_residual = equivariance_residual(data, comps);
    res.log_norm = log_norm(res.k);
    return res;
  };

  for (int it = 0;; ++it) {
    res.iterations = it;
    const Real resid = std::sqrt(2.0 * f);
    if (opts.record_history) res.residual_history.push_back(resid);
    // checked first: μ is quadratic, so a null-cone orbit meets the
    // absolute tolerance long before it gets near 0
    if (zeta_zero && n0 > 0 && res.alpha.norm() <= opts.origin_snap * n0) {
      // the orbit closure contains 0, which is the polystable point at ζ = 0
      for (auto& c : comps) c.setZero();
      f = 0;
      res.snapped_to_origin = true;
      if (opts.record_history) res.residual_history.push_back(0.0);
      return finish(FlowStatus::converged);
    }
    if (resid <= opts.tol) {
      const Real an = res.alpha.norm();
      if (psi_residual(res.alpha) <= opts.tol * std::max(1.0, an * an)) return finish(FlowStatus::converged);
    }
    for (const auto& c : comps)
      if (c.norm() > opts.divergence_factor * std::max(n0, 1e-300)) return finish(FlowStatus::diverged);
    window.push_back(resid);
    if (static_cast<int>(window.size()) > opts.plateau_window) {
      if (window.front() - resid < plateau_tol) return finish(FlowStatus::plateau);
      window.erase(window.begin());
    }
    if (it >= opts.max_iter)
      throw NumericalError("flow reached the iteration cap (" + std::to_string(opts.max_iter) +
                           ") with μ residual " + std::to_string(resid));

    Mat h = project_commutant(data, m - z);
    h = 0.5 * (h + h.adjoint()).eval();
    const Real slope = (m - z).cwiseProduct(mu_derivative(comps, h).conjugate()).sum().real();
    if (!(slope < 0)) return finish(FlowStatus::plateau);

    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Mat& u = es.eigenvectors();
    const RVec& w = es.eigenvalues();
    struct Trial {
      Real s = 0, f = 0;
      Mat e_plus, e_minus;
      std::vector<Mat> comps;
    };
    auto evaluate = [&](Real s) {
      Trial t;
      t.s = s;
      t.e_plus = u * (s * w).array().exp().matrix().cast<Complex>().asDiagonal() * u.adjoint();
      t.e_minus = u * (-s * w).array().exp().matrix().cast<Complex>().asDiagonal() * u.adjoint();
      t.comps.resize(comps.size());
      for (size_t i = 0; i < comps.size(); ++i) t.comps[i] = t.e_plus * comps[i] * t.e_minus;
      t.f = objective(t.comps, z);
      return t;
    };
    std::optional<Trial> best;
    while (step > 1e-30) {
      Trial t = evaluate(step);
      if (t.f <= f + opts.armijo * step * slope) {
        best = std::move(t);
        break;
      }
      step *= opts.backtrack;
    }
    if (!best) return finish(FlowStatus::plateau);
    // Armijo alone happily accepts a step that overshoots to the far side of
    // the minimum; refine with the minimiser of the quadratic through f, slope
    // and the accepted value
    const Real curv = 2.0 * (best->f - f - slope * best->s) / (best->s * best->s);
    if (curv > 0) {
      const Real s_star = -slope / curv;
      if (s_star > 0 && s_star < 4.0 * best->s && std::abs(s_star - best->s) > 0.1 * best->s) {
        Trial t = evaluate(s_star);
        if (t.f < best->f) best = std::move(t);
      }
    }
    step = best->s;
    comps.swap(best->comps);
    f = best->f;
    const Mat& e_plus = best->e_plus;
    const Mat& e_minus = best->e_minus;
    res.k = e_plus * res.k;
    res.k_inv = res.k_inv * e_minus;
    m = mu(comps);
    res.psi_drift = std::max(res.psi_drift, psi_residual(res.alpha));
    step *= 2.0;
  }
}

Mat from_character_basis(const GroupData& data, const Mat& x) {
  const auto& v = data.centre().character_basis;
  if (!v) throw ValidationError("character basis needs an abelian group");
  return *v * x * v->adjoint();
}

Mat to_character_basis(const GroupData& data, const Mat& x) {
  const auto& v = data.centre().character_basis;
  if (!v) throw ValidationError("character basis needs an abelian group");
  return v->adjoint() * x * *v;
}

EquivariantPoint nilpotent_start(const GroupData& data, Rng& rng, bool random_order) {
  const auto& g = data.group();
  if (!g.weights) throw ValidationError("nilpotent starts need a cyclic group spec 1/r(a_1,...,a_n)");
  const int r = g.order;
  const auto& weights = *g.weights;

  std::vector<int> distinct;
  for (int a : weights) {
    const int w = ((a % r) + r) % r;
    if (std::find(distinct.begin(), distinct.end(), w) == distinct.end()) distinct.push_back(w);
  }
  std::uniform_int_distribution<size_t> pick(0, distinct.size() - 1);
  const int w = distinct[pick(rng)];

  std::vector<int> rank(static_cast<size_t>(r));
  std::iota(rank.begin(), rank.end(), 0);
  if (random_order) std::shuffle(rank.begin(), rank.end(), rng);

  // block j carries φ(g) = ε^j, so weight-w components have entries at q − p ≡ w
  Mat x = Mat::Zero(r, r);
  for (int p = 0; p < r; ++p)
    for (int q = 0; q < r; ++q)
      if (((q - p - w) % r + r) % r == 0 && rank[static_cast<size_t>(p)] < rank[static_cast<size_t>(q)])
        x(p, q) = complex_normal(rng);
  const Mat xe = from_character_basis(data, x);

  std::vector<Mat> comps;
  for (int a : weights) {
    if (((a % r) + r) % r == w)
      comps.push_back(complex_normal(rng) * xe);
    else
      comps.push_back(Mat::Zero(r, r));
  }
  return make_point(data, std::move(comps));
}

nlohmann::json matrices_to_json(const std::vector<Mat>& ms) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : ms) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
      rows.push_back(row);
    }
    out.push_back(rows);
  }
  return out;
}

nlohmann::json to_json(const CentralParameter& z) { return z.coefficients; }

nlohmann::json to_json(const FlowResult& f, bool dump_alpha) {
  nlohmann::json j{{"status", to_string(f.status)},
                   {"iterations", f.iterations},
                   {"mu_residual", f.mu_residual},
                   {"psi_residual", f.psi_residual},
                   {"psi_drift", f.psi_drift},
                   {"log_norm", f.log_norm},
                   {"norm", f.alpha.norm()},
                   {"snapped_to_origin", f.snapped_to_origin}};
  if (dump_alpha) j["alpha"] = matrices_to_json(f.alpha.components);
  return j;
}

}  // namespace orbmod
