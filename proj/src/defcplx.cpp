#include "orbmod/defcplx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orbmod/moment.hpp"

namespace orbmod {

Mat bracket_operator(const GroupData& data, const GradedElement& x, int p, int q) {
  const auto& src = data.basis(p, q);
  const int tp = p + x.p();
  const int tq = q + x.q();
  if (tp > data.n() || tq > data.n()) return Mat(0, src.dim());
  const auto& dst = data.basis(tp, tq);
  Mat m(dst.dim(), src.dim());
  for (int k = 0; k < src.dim(); ++k) m.col(k) = dst.coordinates(bracket(x, src.element(k)));
  return m;
}

Mat dbar_operator(const GroupData& data, const EquivariantPoint& a, int p, int q) {
  return bracket_operator(data, as_form(a), p, q);
}

GradedElement dstar_coordinate(const EquivariantPoint& a, const GradedElement& beta) {
  if (beta.q() < 1) throw ValidationError("∂̄* needs q ≥ 1");
  GradedElement out(beta.n(), beta.r(), beta.p(), beta.q() - 1);
  for (int b = 0; b < out.block_count(); ++b) {
    const auto [holo, anti] = out.indices_of(b);
    for (int j = 0; j < beta.n(); ++j) {
      std::vector<int> jj{j};
      jj.insert(jj.end(), anti.begin(), anti.end());
      const Mat c = beta.signed_at(holo, jj);
      out.block(b) += commutator(a.components[j].adjoint(), c);
    }
  }
  return out;
}

std::vector<int> ComplexAtPoint::hodge_defects() const {
  std::vector<int> d;
  const int top = static_cast<int>(dims.size()) - 1;
  for (int q = 0; q <= top; ++q) {
    const int before = q > 0 ? ranks[static_cast<size_t>(q - 1)] : 0;
    const int after = q < top ? ranks[static_cast<size_t>(q)] : 0;
    d.push_back(dims[static_cast<size_t>(q)] - before - after - h(q));
  }
  return d;
}

ComplexAtPoint build_complex(const GroupData& data, const EquivariantPoint& a, int p) {
  const int n = data.n();
  ComplexAtPoint cx;
  cx.alpha = a;
  cx.p = p;
  for (int q = 0; q <= n; ++q) cx.dims.push_back(data.basis(p, q).dim());
  std::vector<RVec> sv;
  Real lmax = 0;
  for (int q = 0; q < n; ++q) {
    cx.dbar.push_back(dbar_operator(data, a, p, q));
    const Mat& d = cx.dbar.back();
    RVec s = d.size() ? RVec(Eigen::JacobiSVD<Mat>(d).singularValues()) : RVec();
    if (s.size()) lmax = std::max(lmax, s(0) * s(0));
    sv.push_back(s);
  }
  cx.threshold = 1e-8 * std::max(lmax, 1e-12);
  for (const auto& s : sv) cx.ranks.push_back(static_cast<int>((s.array().square() > cx.threshold).count()));
  for (int q = 0; q + 1 < n; ++q)
    if (cx.dbar[q].size() && cx.dbar[q + 1].size())
      cx.dbar_squared = std::max(cx.dbar_squared, (cx.dbar[q + 1] * cx.dbar[q]).norm());

  for (int q = 0; q <= n; ++q) {
    const int dim = cx.dims[static_cast<size_t>(q)];
    HarmonicSpace hs;
    hs.p = p;
    hs.q = q;
    hs.threshold = cx.threshold;
    Mat lap = Mat::Zero(dim, dim);
    if (q < n) lap += cx.dbar[q].adjoint() * cx.dbar[q];
    if (q > 0) lap += cx.dbar[q - 1] * cx.dbar[q - 1].adjoint();
    if (dim > 0) {
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (lap + lap.adjoint()));
      hs.laplacian_eigenvalues = es.eigenvalues();
      std::vector<Eigen::Index> kernel;
      Real zero_max = 0, pos_min = std::numeric_limits<Real>::infinity();
      for (Eigen::Index i = 0; i < dim; ++i) {
        const Real l = es.eigenvalues()(i);
        if (l <= cx.threshold) {
          kernel.push_back(i);
          zero_max = std::max(zero_max, std::abs(l));
        } else {
          pos_min = std::min(pos_min, l);
        }
      }
      hs.basis.resize(dim, static_cast<Eigen::Index>(kernel.size()));
      for (size_t k = 0; k < kernel.size(); ++k) hs.basis.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(kernel[k]);
      hs.gap_ratio = (kernel.empty() || !std::isfinite(pos_min)) ? std::numeric_limits<Real>::infinity()
                                                                : pos_min / std::max(zero_max, 1e-300);
    } else {
      hs.basis = Mat(0, 0);
      hs.gap_ratio = std::numeric_limits<Real>::infinity();
    }
    hs.projector = hs.basis * hs.basis.adjoint();
    cx.harmonic.push_back(std::move(hs));
  }
  return cx;
}

GradedElement harmonic_element(const GroupData& data, const ComplexAtPoint& cx, int q, const Vec& coeffs) {
  const auto& hs = cx.harmonic.at(static_cast<size_t>(q));
  return data.basis(cx.p, q).combine(hs.basis * coeffs);
}

GradedElement harmonic_project(const GroupData& data, const ComplexAtPoint& cx, const GradedElement& x) {
  if (x.p() != cx.p) throw ValidationError("harmonic_project: wrong holomorphic degree");
  const auto& b = data.basis(cx.p, x.q());
  const auto& hs = cx.harmonic.at(static_cast<size_t>(x.q()));
  return b.combine(hs.projector * b.coordinates(x));
}

GradedElement kuranishi_two_jet(const GroupData& data, const ComplexAtPoint& cx, const GradedElement& beta, Real tol) {
  if (cx.p != 0 || beta.p() != 0 || beta.q() != 1) throw ValidationError("Φ₍₂₎ acts on (0,1)-forms");
  const Real nb = norm(beta);
  if (norm(beta - harmonic_project(data, cx, beta)) > tol * std::max(nb, 1e-300))
    throw ValidationError("Φ₍₂₎ argument is not harmonic");
  return harmonic_project(data, cx, bracket(beta, beta));
}

JetReport jet_report(const GroupData& data, const ComplexAtPoint& cx, Real tol) {
  JetReport rep;
  const int h = cx.h(1);
  const auto& b = data.basis(0, 1);
  const auto& hs = cx.harmonic[1];
  auto eval = [&](const Vec& c) {
    const GradedElement beta = b.combine(hs.basis * c);
    const Real v = norm(harmonic_project(data, cx, bracket(beta, beta)));
    rep.max_norm = std::max(rep.max_norm, v);
    ++rep.samples;
  };
  const Real s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < h; ++i) {
    eval(Vec::Unit(h, i));
    for (int j = i + 1; j < h; ++j) {
      eval(s * (Vec::Unit(h, i) + Vec::Unit(h, j)));
      eval(s * (Vec::Unit(h, i) + kI * Vec::Unit(h, j)));
    }
  }
  rep.vanishes = rep.max_norm <= tol;
  return rep;
}

ZariskiCheck zariski_tangent_check(const GroupData& data, const ComplexAtPoint& cx) {
  const auto& a = cx.alpha;
  const auto& b01 = data.basis(0, 1);
  const int d = b01.dim();
  const int r = data.r();
  const Mat& dpsi = cx.dbar.size() > 1 ? cx.dbar[1] : Mat(0, d);
  const Eigen::Index rows = 2 * dpsi.rows() + 2 * static_cast<Eigen::Index>(r) * r;
  RMat jac(rows, 2 * d);
  for (int k = 0; k < d; ++k)
    for (int part = 0; part < 2; ++part) {
      const Complex s = part == 0 ? Complex(1.0) : kI;
      const Eigen::Index col = 2 * k + part;
      const Vec dp = s * dpsi.col(k);
      Eigen::Index row = 0;
      for (Eigen::Index i = 0; i < dp.size(); ++i) {
        jac(row++, col) = dp(i).real();
        jac(row++, col) = dp(i).imag();
      }
      const EquivariantPoint beta = as_point(data, s * b01.element(k));
      Mat dmu = Mat::Zero(r, r);
      for (int j = 0; j < a.n(); ++j)
        dmu += commutator(beta.components[j].adjoint(), a.components[j]) +
               commutator(a.components[j].adjoint(), beta.components[j]);
      for (Eigen::Index i = 0; i < dmu.size(); ++i) {
        jac(row++, col) = dmu.data()[i].real();
        jac(row++, col) = dmu.data()[i].imag();
      }
    }
  const RVec sv = Eigen::JacobiSVD<RMat>(jac).singularValues();
  const Real smax = sv.size() ? sv(0) : 0.0;
  const Real thr = 1e-8 * std::max(smax, 1e-12);
  ZariskiCheck z;
  z.kernel_dim = 2 * d - static_cast<int>((sv.array() > thr).count());
  z.orbit_dim = static_cast<int>(data.pu_basis().size()) - stabilizer_info(data, a).dim;
  z.h01 = cx.h(1);
  z.consistent = z.kernel_dim - z.orbit_dim == 2 * z.h01;
  return z;
}

namespace {
nlohmann::json finite_or_null(Real v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
}  // namespace

nlohmann::json to_json(const ComplexAtPoint& cx) {
  nlohmann::json h = nlohmann::json::array(), gaps = nlohmann::json::array();
  for (const auto& hs : cx.harmonic) {
    h.push_back(hs.dim());
    gaps.push_back(finite_or_null(hs.gap_ratio));
  }
  return {{"p", cx.p},       {"dims", cx.dims},           {"ranks", cx.ranks},
          {"harmonic", h},   {"gap_ratios", gaps},        {"threshold", cx.threshold},
          {"dbar_squared", cx.dbar_squared}, {"hodge_defects", cx.hodge_defects()}};
}

nlohmann::json to_json(const JetReport& j) {
  return {{"max_norm", j.max_norm}, {"samples", j.samples}, {"vanishes", j.vanishes}};
}

}  // namespace orbmod
