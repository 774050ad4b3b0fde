#include "orbmod/group.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "json.hpp"

namespace orbmod {

namespace {

using nlohmann::json;

FiniteGroupAction cyclic_group(int r, const std::vector<int>& weights) {
  FiniteGroupAction g;
  g.order = r;
  g.dim = static_cast<int>(weights.size());
  g.weights = weights;
  g.cayley.assign(r, std::vector<int>(r));
  g.inverse.resize(r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) g.cayley[a][b] = (a + b) % r;
    g.inverse[a] = (r - a) % r;
  }
  for (int k = 0; k < r; ++k) {
    Mat m = Mat::Zero(g.dim, g.dim);
    for (int i = 0; i < g.dim; ++i) {
      // reduce the exponent first so the phases are exact at the lattice points
      long e = (static_cast<long>(k) * weights[i]) % r;
      if (e < 0) e += r;
      m(i, i) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<Real>(e) / r);
    }
    g.q.push_back(std::move(m));
  }
  return g;
}

std::optional<FiniteGroupAction> parse_cyclic(std::string_view spec) {
  static const std::regex re(R"(^\s*1\s*/\s*(\d+)\s*\(([^)]*)\)\s*$)");
  std::string s(spec);
  std::smatch m;
  if (!std::regex_match(s, m, re)) return std::nullopt;
  int r = std::stoi(m[1].str());
  if (r < 1) throw ValidationError("group order must be positive in '" + s + "'");
  std::vector<int> weights;
  std::stringstream ss(m[2].str());
  std::string tok;
  static const std::regex int_re(R"(^\s*([+-]?\d+)\s*$)");
  while (std::getline(ss, tok, ',')) {
    std::smatch tm;
    if (!std::regex_match(tok, tm, int_re))
      throw ValidationError("malformed weight '" + tok + "' in group spec '" + s + "'");
    weights.push_back(std::stoi(tm[1].str()));
  }
  if (weights.empty()) throw ValidationError("group spec '" + s + "' has no weights");
  return cyclic_group(r, weights);
}

Mat parse_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("generator must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ValidationError("generator rows must have length n");
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& e = row[static_cast<size_t>(k)];
      if (e.is_number()) {
        m(i, k) = Complex(e.get<Real>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = Complex(e[0].get<Real>(), e[1].get<Real>());
      } else {
        throw ValidationError("matrix entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

int find_element(const std::vector<Mat>& elems, const Mat& m, Real tol) {
  for (size_t i = 0; i < elems.size(); ++i)
    if ((elems[i] - m).norm() <= tol) return static_cast<int>(i);
  return -1;
}

FiniteGroupAction generator_group(std::string_view spec, const GroupOptions& opts) {
  json j;
  try {
    j = json::parse(spec);
  } catch (const json::exception& e) {
    throw ValidationError("malformed group spec: " + std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("generators") || !j["generators"].is_array() ||
      j["generators"].empty())
    throw ValidationError("structured group spec needs a non-empty \"generators\" array");

  int cap = opts.order_cap;
  if (j.contains("order_cap")) cap = j["order_cap"].get<int>();

  std::vector<Mat> gens;
  for (const auto& gj : j["generators"]) gens.push_back(parse_matrix(gj));
  const auto n = gens.front().rows();
  for (const auto& m : gens) {
    if (m.rows() != n) throw ValidationError("generators must share one dimension");
    Real u = (m.adjoint() * m - Mat::Identity(n, n)).norm();
    if (u > opts.tol)
      throw ValidationError("generator is not unitary (residual " + std::to_string(u) + ")");
  }

  const Real match_tol = 1e3 * opts.tol;
  std::vector<Mat> elems{Mat::Identity(n, n)};
  for (const auto& m : gens)
    if (find_element(elems, m, match_tol) < 0) elems.push_back(m);
  std::deque<int> queue;
  for (size_t i = 0; i < elems.size(); ++i) queue.push_back(static_cast<int>(i));
  while (!queue.empty()) {
    int e = queue.front();
    queue.pop_front();
    for (const auto& s : gens) {
      Mat p = s * elems[static_cast<size_t>(e)];
      if (find_element(elems, p, match_tol) >= 0) continue;
      if (static_cast<int>(elems.size()) >= cap)
        throw ValidationError("generators do not close within order cap " + std::to_string(cap));
      elems.push_back(p);
      queue.push_back(static_cast<int>(elems.size()) - 1);
    }
  }

  FiniteGroupAction g;
  g.order = static_cast<int>(elems.size());
  g.dim = static_cast<int>(n);
  g.cayley.assign(g.order, std::vector<int>(g.order));
  g.inverse.resize(g.order);
  for (int a = 0; a < g.order; ++a) {
    for (int b = 0; b < g.order; ++b) {
      int idx = find_element(elems, elems[a] * elems[b], match_tol);
      if (idx < 0) throw NumericalError("group closure is inconsistent");
      g.cayley[a][b] = idx;
      if (idx == 0) g.inverse[a] = b;
    }
  }
  g.q = std::move(elems);
  return g;
}

void finish_group(FiniteGroupAction& g, const GroupOptions& opts) {
  std::vector<int> seen(g.order, -1);
  for (int a = 0; a < g.order; ++a) {
    if (seen[a] >= 0) continue;
    std::vector<int> cls;
    for (int b = 0; b < g.order; ++b) {
      int c = g.mul(g.mul(b, a), g.inverse[b]);
      if (seen[c] < 0) {
        seen[c] = static_cast<int>(g.classes.size());
        cls.push_back(c);
      }
    }
    std::sort(cls.begin(), cls.end());
    g.classes.push_back(std::move(cls));
  }

  g.free_outside_origin = true;
  for (int a = 1; a < g.order; ++a) {
    Eigen::ComplexEigenSolver<Mat> es(g.q[a], false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()(i) - Complex(1.0, 0.0)) < opts.freeness_tol)
        g.free_outside_origin = false;
  }
}

}  // namespace

bool FiniteGroupAction::is_abelian() const {
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < a; ++b)
      if (cayley[a][b] != cayley[b][a]) return false;
  return true;
}

FiniteGroupAction build_group(std::string_view spec, const GroupOptions& opts) {
  FiniteGroupAction g;
  if (auto cyc = parse_cyclic(spec)) {
    g = std::move(*cyc);
    if (g.order > opts.order_cap)
      throw ValidationError("group order exceeds cap " + std::to_string(opts.order_cap));
  } else {
    auto first = spec.find_first_not_of(" \t\n\r");
    if (first == std::string_view::npos || spec[first] != '{')
      throw ValidationError("malformed group spec '" + std::string(spec) +
                            "': expected 1/r(a_1,...,a_n) or a generator block");
    g = generator_group(spec, opts);
  }
  g.spec = std::string(spec);
  finish_group(g, opts);
  if (Real h = homomorphism_residual(g); h > 1e-8)
    throw NumericalError("Q is not a homomorphism (residual " + std::to_string(h) + ")");
  return g;
}

RegularRep regular_rep(const FiniteGroupAction& g) {
  RegularRep reg;
  reg.phi.reserve(g.order);
  for (int a = 0; a < g.order; ++a) {
    Mat p = Mat::Zero(g.order, g.order);
    for (int d = 0; d < g.order; ++d) p(g.mul(a, d), d) = 1.0;
    reg.phi.push_back(std::move(p));
  }
  return reg;
}

namespace {

IsotypicStructure blocks_from_class_sums(const FiniteGroupAction& g, const RegularRep& reg,
                                         unsigned seed) {
  const int r = g.order;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> unif(-1.0, 1.0);
  Mat h = Mat::Zero(r, r);
  for (const auto& cls : g.classes) {
    Mat c = Mat::Zero(r, r);
    for (int e : cls) c += reg.phi[e];
    h += unif(rng) * (c + c.adjoint()) + unif(rng) * kI * (c - c.adjoint());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const RVec& w = es.eigenvalues();
  const Real scale = std::max(1.0, w.cwiseAbs().maxCoeff());

  struct Cluster {
    Real value;
    std::vector<Eigen::Index> cols;
  };
  std::vector<Cluster> clusters;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (clusters.empty() || w(i) - clusters.back().value > 1e-6 * scale)
      clusters.push_back({w(i), {}});
    clusters.back().cols.push_back(i);
  }

  IsotypicStructure iso;
  Vec ones = Vec::Ones(r);
  std::vector<std::tuple<int, int, Real, size_t>> order;
  for (size_t c = 0; c < clusters.size(); ++c) {
    const auto& cl = clusters[c];
    Mat v(r, static_cast<Eigen::Index>(cl.cols.size()));
    for (size_t k = 0; k < cl.cols.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(cl.cols[k]);
    Mat p = v * v.adjoint();
    int rank = static_cast<int>(cl.cols.size());
    int d = static_cast<int>(std::lround(std::sqrt(static_cast<Real>(rank))));
    if (d * d != rank) throw NumericalError("isotypic block rank is not a square");
    bool trivial = (p * ones).norm() > 0.5;
    iso.blocks.push_back({d, p});
    order.emplace_back(trivial ? 0 : 1, d, cl.value, c);
  }
  std::sort(order.begin(), order.end());
  IsotypicStructure sorted;
  for (const auto& o : order) sorted.blocks.push_back(iso.blocks[std::get<3>(o)]);
  return sorted;
}

}  // namespace

IsotypicCentre isotypic_centre(const FiniteGroupAction& g, const RegularRep& reg) {
  const int r = g.order;
  IsotypicCentre out;
  if (g.weights) {
    // character basis of Z_r: φ(1) v_j = ε^j v_j
    Mat v(r, r);
    for (int d = 0; d < r; ++d)
      for (int j = 0; j < r; ++j)
        v(d, j) = std::polar(1.0 / std::sqrt(static_cast<Real>(r)),
                             -2.0 * std::numbers::pi * static_cast<Real>((j * d) % r) / r);
    for (int j = 0; j < r; ++j) out.structure.blocks.push_back({1, v.col(j) * v.col(j).adjoint()});
    out.character_basis = v;
  } else {
    bool ok = false;
    for (unsigned seed = 1; seed <= 5 && !ok; ++seed) {
      out.structure = blocks_from_class_sums(g, reg, seed);
      ok = static_cast<int>(out.structure.blocks.size()) == g.class_count();
    }
    if (!ok) throw NumericalError("could not separate the isotypic components of R");
    bool abelian = std::all_of(out.structure.blocks.begin(), out.structure.blocks.end(),
                               [](const IsotypicBlock& b) { return b.irrep_dim == 1; });
    if (abelian) {
      Mat v(r, r);
      for (int j = 0; j < r; ++j) v.col(j) = out.structure.blocks[j].projector.col(0).normalized();
      out.character_basis = v;
    }
  }

  int dim_sum = 0;
  for (const auto& b : out.structure.blocks) dim_sum += b.irrep_dim * b.irrep_dim;
  if (dim_sum != r) throw NumericalError("isotypic dimensions do not sum to |Γ|");
  if (Real res = projector_residuals(out.structure, reg).max(); res > 1e-9)
    throw NumericalError("projector reconstruction residual " + std::to_string(res));

  const Mat& p0 = out.structure.blocks.front().projector;
  for (size_t i = 1; i < out.structure.blocks.size(); ++i) {
    const auto& b = out.structure.blocks[i];
    out.centre_basis.push_back(b.projector / static_cast<Real>(b.irrep_dim * b.irrep_dim) - p0);
  }
  return out;
}

Real homomorphism_residual(const FiniteGroupAction& g) {
  Real m = 0;
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b)
      m = std::max(m, (g.q[a] * g.q[b] - g.q[g.mul(a, b)]).norm());
  return m;
}

Real unitarity_residual(const FiniteGroupAction& g) {
  Real m = 0;
  for (const auto& q : g.q)
    m = std::max(m, (q.adjoint() * q - Mat::Identity(g.dim, g.dim)).norm());
  return m;
}

Real homomorphism_residual(const FiniteGroupAction& g, const RegularRep& reg) {
  Real m = 0;
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b)
      m = std::max(m, (reg.phi[a] * reg.phi[b] - reg.phi[g.mul(a, b)]).norm());
  return m;
}

Real ProjectorResiduals::max() const {
  return std::max({idempotent, hermitian, orthogonal, complete, commutes});
}

ProjectorResiduals projector_residuals(const IsotypicStructure& iso, const RegularRep& reg) {
  ProjectorResiduals res;
  if (iso.blocks.empty()) return res;
  const auto r = iso.blocks.front().projector.rows();
  Mat sum = Mat::Zero(r, r);
  for (size_t i = 0; i < iso.blocks.size(); ++i) {
    const Mat& p = iso.blocks[i].projector;
    sum += p;
    res.idempotent = std::max(res.idempotent, (p * p - p).norm());
    res.hermitian = std::max(res.hermitian, hermitian_residual(p));
    for (size_t j = 0; j < i; ++j)
      res.orthogonal = std::max(res.orthogonal, (p * iso.blocks[j].projector).norm());
    for (const auto& f : reg.phi) res.commutes = std::max(res.commutes, commutator(p, f).norm());
  }
  res.complete = (sum - Mat::Identity(r, r)).norm();
  return res;
}

}  // namespace orbmod
