#include "orbmod/metric.hpp"

#include <cmath>
#include <iomanip>

#include "orbmod/parallel.hpp"
#include "orbmod/zero_fiber.hpp"

namespace orbmod {

const Mat& horizontal_projector(const ComplexAtPoint& cx) {
  if (cx.p != 0 || cx.harmonic.size() < 2) throw ValidationError("horizontal projector needs the (0,q) complex");
  return cx.harmonic[1].projector;
}

Real quotient_metric(const GroupData& data, const ComplexAtPoint& cx, const GradedElement& u, const GradedElement& v) {
  if (u.p() != 0 || u.q() != 1 || v.p() != 0 || v.q() != 1)
    throw ValidationError("tangent vectors must be (0,1)-forms");
  if (stabilizer_dim(data, cx.alpha) != 0) throw ValidationError("quotient metric needs a trivial stabilizer");
  const auto& b = data.basis(0, 1);
  const Mat& p = horizontal_projector(cx);
  const Vec cu = b.coordinates(u);
  const Vec cv = b.coordinates(v);
  const Real tol = 1e-8 * std::max(1.0, std::max(cu.norm(), cv.norm()));
  if ((b.vectors * cu - to_vector(u)).norm() > tol || (b.vectors * cv - to_vector(v)).norm() > tol)
    throw ValidationError("tangent vectors must be Γ-invariant");
  return (p * cv).dot(p * cu).real();
}

std::vector<GradedElement> transported_frame(const GroupData& data, const Mat& k, const Mat& k_inv) {
  std::vector<GradedElement> frame;
  for (int i = 0; i < data.n(); ++i) {
    const EquivariantPoint d = diagonal_point(data, make_orbit(data, Vec::Unit(data.n(), i)));
    GradedElement u(data.n(), data.r(), 0, 1);
    for (int j = 0; j < data.n(); ++j) u.at({}, {j}) = k * d.components[j] * k_inv;
    frame.push_back(u);
    frame.push_back(kI * u);
  }
  return frame;
}

RMat metric_matrix(const GroupData& data, const ComplexAtPoint& cx, const std::vector<GradedElement>& frame) {
  const auto& b = data.basis(0, 1);
  const Mat& p = horizontal_projector(cx);
  const auto m = static_cast<Eigen::Index>(frame.size());
  Mat coords(p.rows(), m);
  for (Eigen::Index a = 0; a < m; ++a) coords.col(a) = p * b.coordinates(frame[static_cast<size_t>(a)]);
  // δ_i has r unit diagonal entries, weighted by the (0,1) form factor
  const Real flat = form_factor(0, 1) * data.r();
  return (coords.adjoint() * coords).real() / flat;
}

namespace {

struct Solved {
  FlowResult flow;
  RMat g;
};

Solved solve_metric(const GroupData& data, const CentralParameter& z, const Vec& base, const FlowOptions& fo) {
  const EquivariantPoint start = diagonal_point(data, make_orbit(data, base));
  Solved s{kempf_ness_flow(data, start, z, fo), {}};
  if (s.flow.status == FlowStatus::converged) {
    const ComplexAtPoint cx = build_complex(data, s.flow.alpha);
    s.g = metric_matrix(data, cx, transported_frame(data, s.flow.k, s.flow.k_inv));
  }
  return s;
}

}  // namespace

AleReport ale_decay_probe(const GroupData& data, const std::vector<Real>& zeta, const Vec& theta,
                          const std::vector<Real>& radii, const AleOptions& opts) {
  AleReport rep;
  rep.zeta = zeta;
  const CentralParameter z = make_zeta(data, zeta);
  if (theta.size() != data.n() || theta.norm() == 0.0) throw ValidationError("θ must be a nonzero vector in C^n");
  rep.theta = theta / theta.norm();
  if (make_orbit(data, rep.theta).distinct != data.r()) throw ValidationError("θ must have a free Γ-orbit");
  for (Real r : radii)
    if (!(r > 0)) throw ValidationError("radii must be positive");

  rep.samples.resize(radii.size());
  parallel_for(static_cast<int>(radii.size()), worker_count(opts.threads), [&](int i) {
    MetricSample& s = rep.samples[static_cast<size_t>(i)];
    const Real radius = radii[static_cast<size_t>(i)];
    s.radius = radius;
    try {
      std::vector<Real> scaled(zeta);
      for (auto& v : scaled) v /= radius * radius;
      const Solved unit = solve_metric(data, make_zeta(data, scaled), rep.theta, opts.flow);
      s.status = unit.flow.status;
      s.iterations = unit.flow.iterations;
      if (s.status != FlowStatus::converged) return;
      s.g = unit.g;
      s.deviation = (s.g - RMat::Identity(s.g.rows(), s.g.cols())).norm();
      if (opts.self_test) {
        // μ is quadratic, so the same relative accuracy at radius R is tol·R²
        FlowOptions fo = opts.flow;
        fo.tol *= std::max(1.0, radius * radius);
        const Solved direct = solve_metric(data, z, radius * rep.theta, fo);
        if (direct.flow.status == FlowStatus::converged) s.self_test = (direct.g - s.g).norm();
        else s.error = "direct flow at radius " + std::to_string(radius) + ": " + to_string(direct.flow.status);
      }
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  });

  std::vector<Real> xs, ys;
  rep.monotone = true;
  Real prev = 0;
  bool first = true;
  for (const auto& s : rep.samples) {
    if (!s.ok()) continue;
    if (s.self_test) rep.max_self_test = std::max(rep.max_self_test, *s.self_test);
    if (!first && s.deviation > prev) rep.monotone = false;
    prev = s.deviation;
    first = false;
    if (s.deviation > 1e-13) {
      xs.push_back(std::log(s.radius));
      ys.push_back(std::log(s.deviation));
    }
  }
  if (xs.size() >= 2) {
    const auto m = static_cast<Eigen::Index>(xs.size());
    RMat a(m, 2);
    RVec y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      a(i, 0) = xs[static_cast<size_t>(i)];
      a(i, 1) = 1.0;
      y(i) = ys[static_cast<size_t>(i)];
    }
    const RVec c = a.colPivHouseholderQr().solve(y);
    rep.slope = c(0);
    rep.intercept = c(1);
    const Real ss_res = (a * c - y).squaredNorm();
    const Real ss_tot = (y.array() - y.mean()).square().sum();
    rep.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  return rep;
}

nlohmann::json to_json(const AleReport& rep) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : rep.samples) {
    nlohmann::json j{{"radius", s.radius},
                     {"status", to_string(s.status)},
                     {"iterations", s.iterations},
                     {"deviation", s.deviation}};
    j["self_test"] = s.self_test ? nlohmann::json(*s.self_test) : nlohmann::json(nullptr);
    if (!s.error.empty()) j["error"] = s.error;
    samples.push_back(j);
  }
  nlohmann::json theta = nlohmann::json::array();
  for (Eigen::Index i = 0; i < rep.theta.size(); ++i) theta.push_back({rep.theta(i).real(), rep.theta(i).imag()});
  auto opt = [](const std::optional<Real>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"zeta", rep.zeta},
          {"theta", theta},
          {"samples", samples},
          {"slope", opt(rep.slope)},
          {"intercept", opt(rep.intercept)},
          {"r_squared", opt(rep.r_squared)},
          {"monotone", rep.monotone},
          {"max_self_test", rep.max_self_test}};
}

void write_csv(std::ostream& os, const AleReport& rep) {
  os << "radius,deviation,self_test,status,iterations\n";
  os << std::setprecision(17);
  for (const auto& s : rep.samples) {
    os << s.radius << ',' << s.deviation << ',';
    if (s.self_test) os << *s.self_test;
    os << ',' << to_string(s.status) << ',' << s.iterations << '\n';
  }
}

}  // namespace orbmod
