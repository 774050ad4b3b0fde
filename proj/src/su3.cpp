#include "orbmod/su3.hpp"

#include <algorithm>
#include <cmath>

#include "orbmod/moment.hpp"

namespace orbmod {

namespace {

void require_three(const GradedElement& x) {
  if (x.n() != 3) throw ValidationError("Ω and the cubic form need n = 3");
  if (x.p() != 0 || x.q() != 1) throw ValidationError("Ω and the cubic form take (0,1)-forms");
}

/// trace of the single coefficient of a (0,3)-form on C³
Complex kappa_trace(const GradedElement& top) { return top.block(0).trace(); }

}  // namespace

TangentFrame tangent_frame(const GroupData& data, const ComplexAtPoint& cx) {
  if (data.n() != 3) throw ValidationError("tangent frames need n = 3");
  if (cx.h(1) != 3)
    throw ValidationError("tangent dimension is " + std::to_string(cx.h(1)) + ", not 3");
  TangentFrame f;
  f.alpha = cx.alpha;
  for (int k = 0; k < 3; ++k) f.elements.push_back(harmonic_element(data, cx, 1, Vec::Unit(3, k)));
  Mat gram(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gram(i, j) = hermitian_product(f.elements[i], f.elements[j]);
  f.gram_residual = (gram - Mat::Identity(3, 3)).norm();
  return f;
}

Complex omega_form(const GradedElement& eta, const GradedElement& beta, const GradedElement& delta) {
  require_three(eta);
  require_three(beta);
  require_three(delta);
  return kappa_trace(product(product(eta, beta), delta));
}

Complex cubic_form(const GradedElement& beta) {
  require_three(beta);
  return kappa_trace(product(beta, bracket(beta, beta)));
}

Complex symmetric_tensor(const GroupData& data, const ComplexAtPoint& cx, const GradedElement& eta,
                         const GradedElement& beta, const GradedElement& delta) {
  require_three(eta);
  return kappa_trace(product(eta, harmonic_project(data, cx, bracket(beta, delta))));
}

Real omega_norm_coefficient(const TangentFrame& frame) {
  if (frame.elements.size() != 3) throw ValidationError("Ω needs a frame of three elements");
  return kOmegaNormalization * std::norm(omega_form(frame.elements[0], frame.elements[1], frame.elements[2]));
}

Real omega_norm_coefficient(const GroupData& data, const ComplexAtPoint& cx) {
  return omega_norm_coefficient(tangent_frame(data, cx));
}

Real omega_norm_coefficient(const GroupData& data, const EquivariantPoint& a) {
  return omega_norm_coefficient(data, build_complex(data, a));
}

RicciProbe ricci_flat_probe(const std::vector<Real>& values, Real tol) {
  if (values.empty()) throw ValidationError("Ricci probe needs at least one sample");
  RicciProbe p;
  p.values = values;
  p.min = *std::min_element(values.begin(), values.end());
  p.max = *std::max_element(values.begin(), values.end());
  p.spread = p.max - p.min;
  p.verdict = p.spread > tol * std::abs(p.max) ? "not Ricci-flat" : "constant-on-samples";
  return p;
}

RicciProbe ricci_flat_probe(const GroupData& data, const std::vector<EquivariantPoint>& points, Real tol) {
  std::vector<Real> v;
  v.reserve(points.size());
  for (const auto& a : points) v.push_back(omega_norm_coefficient(data, a));
  return ricci_flat_probe(v, tol);
}

namespace {

EquivariantPoint single_component(const GroupData& data, const Mat& x) {
  if (data.n() != 3 || data.r() != 3) throw ValidationError("the worked example lives on 1/3(1,1,1)");
  std::vector<Mat> comps{from_character_basis(data, x), Mat::Zero(3, 3), Mat::Zero(3, 3)};
  return make_point(data, std::move(comps));
}

}  // namespace

EquivariantPoint point1(const GroupData& data, Real a, Real b) {
  Mat x = Mat::Zero(3, 3);
  x(0, 1) = a;
  x(1, 2) = b;
  return single_component(data, x);
}

EquivariantPoint point2(const GroupData& data, Real a, Real b, Real c) {
  Mat x = Mat::Zero(3, 3);
  x(0, 1) = a + c;
  x(1, 2) = b + c;
  x(2, 0) = c;
  return single_component(data, x);
}

Real point1_reference(Real a, Real b) {
  const Real t = a * b / (a * a + b * b);
  return 0.5 * t * t;
}

nlohmann::json to_json(const RicciProbe& p) {
  return {{"values", p.values}, {"min", p.min}, {"max", p.max}, {"spread", p.spread}, {"verdict", p.verdict}};
}

}  // namespace orbmod
