#include "orbmod/equivariant.hpp"

#include <algorithm>
#include <cmath>

namespace orbmod {

Complex complex_normal(Rng& rng) {
  std::normal_distribution<Real> nd(0.0, 1.0);
  Real re = nd(rng);
  Real im = nd(rng);
  return {re, im};
}

Mat exp_hermitian(const Mat& h, Complex s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  Vec e = (s * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * e.asDiagonal() * es.eigenvectors().adjoint();
}

GradedElement MGammaBasis::element(int k) const { return from_vector(vectors.col(k), n, r, p, q); }

GradedElement MGammaBasis::combine(const Vec& coeffs) const {
  return from_vector(vectors * coeffs, n, r, p, q);
}

Vec MGammaBasis::coordinates(const GradedElement& x) const {
  if (x.p() != p || x.q() != q || x.n() != n || x.r() != r)
    throw ValidationError("element does not live in M^{p,q} of this basis");
  return vectors.adjoint() * to_vector(x);
}

GroupData::GroupData(FiniteGroupAction g)
    : group_(std::move(g)), regular_(regular_rep(group_)), centre_(isotypic_centre(group_, regular_)) {
  const int r = group_.order;
  const Mat scalar = kI * Mat::Identity(r, r) / std::sqrt(static_cast<Real>(r));
  std::vector<Mat> candidates;
  for (const Mat& b : commutant_basis(*this)) {
    candidates.push_back(0.5 * (b - b.adjoint()));
    candidates.push_back(0.5 * kI * (b + b.adjoint()));
  }
  auto real_dot = [](const Mat& a, const Mat& b) { return (a.array() * b.array().conjugate()).sum().real(); };
  for (Mat c : candidates) {
    c -= real_dot(c, scalar) * scalar;
    for (const Mat& e : pu_basis_) c -= real_dot(c, e) * e;
    Real nn = c.norm();
    if (nn > 1e-8) pu_basis_.push_back(c / nn);
  }
}

std::shared_ptr<const GroupData> GroupData::load(std::string_view spec, const GroupOptions& opts) {
  return std::make_shared<const GroupData>(build_group(spec, opts));
}

const MGammaBasis& GroupData::basis(int p, int q) const {
  if (p < 0 || q < 0 || p > n() || q > n())
    throw ValidationError("M^{p,q} requested outside 0..n");
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = bases_[{p, q}];
  if (!slot) slot = std::make_unique<MGammaBasis>(mgamma_basis(*this, p, q));
  return *slot;
}

Real equivariance_residual(const GroupData& data, const std::vector<Mat>& comps) {
  const auto& g = data.group();
  const auto& phi = data.regular().phi;
  Real m = 0;
  for (int a = 0; a < g.order; ++a) {
    const Mat& f = phi[a];
    const Mat& finv = phi[g.inverse[a]];
    std::vector<Mat> conj;
    conj.reserve(comps.size());
    for (const auto& c : comps) conj.push_back(f * c * finv);
    for (int k = 0; k < g.dim; ++k) {
      Mat s = -comps[k];
      for (int l = 0; l < g.dim; ++l) s += g.q[a](k, l) * conj[l];
      m = std::max(m, s.norm());
    }
  }
  return m;
}

EquivariantPoint make_point(const GroupData& data, std::vector<Mat> comps, Real tol) {
  if (static_cast<int>(comps.size()) != data.n())
    throw ValidationError("expected " + std::to_string(data.n()) + " components");
  for (const auto& c : comps)
    if (c.rows() != data.r() || c.cols() != data.r())
      throw ValidationError("components must be " + std::to_string(data.r()) + "x" +
                            std::to_string(data.r()));
  EquivariantPoint pt{std::move(comps), 0.0};
  pt.equivariance_residual = equivariance_residual(data, pt.components);
  if (pt.equivariance_residual > tol * std::max(1.0, pt.norm()))
    throw ValidationError("point is not Γ-equivariant (residual " +
                          std::to_string(pt.equivariance_residual) + ")");
  return pt;
}

EquivariantPoint zero_point(const GroupData& data) {
  return {std::vector<Mat>(static_cast<size_t>(data.n()), Mat::Zero(data.r(), data.r())), 0.0};
}

GradedElement as_form(const EquivariantPoint& a) {
  GradedElement x(a.n(), a.r(), 0, 1);
  for (int k = 0; k < a.n(); ++k) x.at({}, {k}) = a.components[k];
  return x;
}

EquivariantPoint as_point(const GroupData& data, const GradedElement& x) {
  if (x.p() != 0 || x.q() != 1) throw ValidationError("only (0,1)-forms are points of M");
  std::vector<Mat> comps;
  for (int k = 0; k < x.n(); ++k) comps.push_back(x.at({}, {k}));
  EquivariantPoint pt{std::move(comps), 0.0};
  pt.equivariance_residual = equivariance_residual(data, pt.components);
  return pt;
}

namespace {

Complex minor_det(const Mat& m, const MultiIndex& rows, const MultiIndex& cols) {
  const auto k = static_cast<Eigen::Index>(rows.size());
  if (k == 0) return 1.0;
  Mat sub(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = m(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]);
  return sub.determinant();
}

/// Matrix of γ on the form part of M^{p,q}, indexed by block positions.
Mat form_action(const GroupData& data, int gamma, int p, int q) {
  const Mat& qg = data.group().q[gamma];
  const Mat qbar = qg.conjugate();
  auto holo = combinations(data.n(), p);
  auto anti = combinations(data.n(), q);
  const auto na = static_cast<Eigen::Index>(anti.size());
  const auto c = static_cast<Eigen::Index>(holo.size()) * na;
  Mat lam(c, c);
  for (Eigen::Index a = 0; a < c; ++a)
    for (Eigen::Index b = 0; b < c; ++b)
      lam(a, b) = minor_det(qbar, holo[a / na], holo[b / na]) * minor_det(qg, anti[a % na], anti[b % na]);
  return lam;
}

}  // namespace

GradedElement act(const GroupData& data, int gamma, const GradedElement& x) {
  const Mat lam = form_action(data, gamma, x.p(), x.q());
  const Mat& f = data.regular().phi[gamma];
  const Mat& finv = data.regular().phi[data.group().inverse[gamma]];
  GradedElement out(x.n(), x.r(), x.p(), x.q());
  for (int b = 0; b < x.block_count(); ++b) {
    if (x.block(b).isZero(0.0)) continue;
    Mat conj = f * x.block(b) * finv;
    for (int a = 0; a < out.block_count(); ++a)
      if (lam(a, b) != Complex(0.0)) out.block(a) += lam(a, b) * conj;
  }
  return out;
}

MGammaBasis mgamma_basis(const GroupData& data, int p, int q) {
  const int n = data.n();
  const int r = data.r();
  const auto& g = data.group();
  MGammaBasis out;
  out.n = n;
  out.r = r;
  out.p = p;
  out.q = q;
  const Eigen::Index dim = vector_size(n, r, p, q);
  if (dim == 0) {
    out.vectors = Mat::Zero(0, 0);
    return out;
  }
  const Eigen::Index rr = static_cast<Eigen::Index>(r) * r;
  const Eigen::Index blocks = dim / rr;

  // averaging projector (1/|Γ|) Σ_γ Λ(γ) ⊗ Ad φ(γ); Ad φ(γ) permutes entries (a,b) → (γa, γb)
  Mat proj = Mat::Zero(dim, dim);
  for (int gm = 0; gm < g.order; ++gm) {
    Mat lam = form_action(data, gm, p, q);
    for (Eigen::Index ka = 0; ka < blocks; ++ka)
      for (Eigen::Index kb = 0; kb < blocks; ++kb) {
        const Complex l = lam(ka, kb);
        if (l == Complex(0.0)) continue;
        for (int a = 0; a < r; ++a)
          for (int b = 0; b < r; ++b)
            proj(ka * rr + g.mul(gm, a) * r + g.mul(gm, b), kb * rr + a * r + b) += l;
      }
  }
  proj /= static_cast<Real>(g.order);

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (proj + proj.adjoint()));
  const RVec& w = es.eigenvalues();
  const Real largest = std::max(w.maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) > 1e-9 * std::max(largest, 1.0)) {
      keep.push_back(i);
      out.kept_min = std::min(out.kept_min, w(i));
    } else {
      out.dropped_max = std::max(out.dropped_max, w(i));
    }
  }
  if (out.kept_min < 1.0 - 1e-6)
    throw NumericalError("ambiguous rank in invariant subspace of M^{" + std::to_string(p) + "," +
                         std::to_string(q) + "}: projector eigenvalue " + std::to_string(out.kept_min));
  out.vectors.resize(dim, static_cast<Eigen::Index>(keep.size()));
  // eigenvalues come ascending; list kept vectors in that order
  for (size_t k = 0; k < keep.size(); ++k) out.vectors.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
  return out;
}

EquivariantPoint random_point(const GroupData& data, Rng& rng, Real scale) {
  const auto& b = data.basis(0, 1);
  Vec c(b.dim());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = scale * complex_normal(rng);
  return as_point(data, b.combine(c));
}

std::vector<Mat> commutant_basis(const GroupData& data) {
  const auto& b = data.basis(0, 0);
  std::vector<Mat> out;
  for (int k = 0; k < b.dim(); ++k) out.push_back(b.element(k).block(0));
  return out;
}

Mat random_commutant_unitary(const GroupData& data, Rng& rng, Real scale) {
  const int r = data.r();
  std::normal_distribution<Real> nd(0.0, scale);
  Mat h = nd(rng) * Mat::Identity(r, r);
  // iξ is Hermitian for ξ ∈ pu^Γ
  for (const Mat& xi : data.pu_basis()) h += nd(rng) * (kI * xi);
  return exp_hermitian(h, kI);
}

Mat project_commutant(const GroupData& data, const Mat& x) {
  const auto& g = data.group();
  Mat s = Mat::Zero(x.rows(), x.cols());
  for (int a = 0; a < g.order; ++a)
    s += data.regular().phi[a] * x * data.regular().phi[g.inverse[a]];
  return s / static_cast<Real>(g.order);
}

}  // namespace orbmod
