#include "orbmod/graded.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace orbmod {

std::vector<MultiIndex> combinations(int n, int k) {
  std::vector<MultiIndex> out;
  if (k < 0 || k > n) return out;
  MultiIndex cur(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<size_t>(i)] = i;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j) cur[static_cast<size_t>(j)] = cur[static_cast<size_t>(j - 1)] + 1;
  }
  return out;
}

int wedge_sign(const std::vector<int>& seq, MultiIndex& sorted) {
  sorted = seq;
  int sign = 1;
  // insertion sort, counting transpositions
  for (size_t i = 1; i < sorted.size(); ++i) {
    for (size_t j = i; j > 0 && sorted[j - 1] >= sorted[j]; --j) {
      if (sorted[j - 1] == sorted[j]) return 0;
      std::swap(sorted[j - 1], sorted[j]);
      sign = -sign;
    }
  }
  return sign;
}

GradedElement::GradedElement(int n, int r, int p, int q)
    : n_(n), r_(r), p_(p), q_(q), holo_(combinations(n, p)), antiholo_(combinations(n, q)) {
  if (n < 0 || r < 0 || p < 0 || q < 0) throw ValidationError("negative graded dimensions");
  blocks_.assign(holo_.size() * antiholo_.size(), Mat::Zero(r, r));
}

int GradedElement::block_index(const MultiIndex& holo, const MultiIndex& antiholo) const {
  auto hi = std::lower_bound(holo_.begin(), holo_.end(), holo);
  auto ai = std::lower_bound(antiholo_.begin(), antiholo_.end(), antiholo);
  if (hi == holo_.end() || *hi != holo || ai == antiholo_.end() || *ai != antiholo)
    throw ValidationError("multi-index out of range for M^{" + std::to_string(p_) + "," +
                          std::to_string(q_) + "}");
  return static_cast<int>((hi - holo_.begin()) * static_cast<long>(antiholo_.size()) +
                          (ai - antiholo_.begin()));
}

std::pair<MultiIndex, MultiIndex> GradedElement::indices_of(int k) const {
  const auto na = static_cast<int>(antiholo_.size());
  return {holo_[static_cast<size_t>(k / na)], antiholo_[static_cast<size_t>(k % na)]};
}

Mat& GradedElement::at(const MultiIndex& holo, const MultiIndex& antiholo) {
  return blocks_[static_cast<size_t>(block_index(holo, antiholo))];
}

const Mat& GradedElement::at(const MultiIndex& holo, const MultiIndex& antiholo) const {
  return blocks_[static_cast<size_t>(block_index(holo, antiholo))];
}

Mat GradedElement::signed_at(const std::vector<int>& holo, const std::vector<int>& antiholo) const {
  MultiIndex hs, as;
  int s = wedge_sign(holo, hs) * wedge_sign(antiholo, as);
  if (s == 0) return Mat::Zero(r_, r_);
  return static_cast<Real>(s) * at(hs, as);
}

GradedElement& GradedElement::operator+=(const GradedElement& o) {
  if (!same_shape(o)) throw ValidationError("degree mismatch in graded sum");
  for (size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += o.blocks_[k];
  return *this;
}

GradedElement& GradedElement::operator-=(const GradedElement& o) {
  if (!same_shape(o)) throw ValidationError("degree mismatch in graded difference");
  for (size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= o.blocks_[k];
  return *this;
}

GradedElement& GradedElement::operator*=(Complex s) {
  for (auto& b : blocks_) b *= s;
  return *this;
}

Real GradedElement::coefficient_norm2() const {
  Real s = 0;
  for (const auto& b : blocks_) s += b.squaredNorm();
  return s;
}

GradedElement operator+(GradedElement a, const GradedElement& b) { return a += b; }
GradedElement operator-(GradedElement a, const GradedElement& b) { return a -= b; }
GradedElement operator*(Complex s, GradedElement a) { return a *= s; }

Real form_factor(int p, int q) { return std::ldexp(1.0, p + q); }

namespace {

void check_compatible(const GradedElement& x, const GradedElement& y) {
  if (x.n() != y.n() || x.r() != y.r())
    throw ValidationError("graded elements live over different (n, r)");
}

std::vector<int> concat(const MultiIndex& a, const MultiIndex& b) {
  std::vector<int> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

GradedElement product(const GradedElement& x, const GradedElement& y) {
  check_compatible(x, y);
  GradedElement out(x.n(), x.r(), x.p() + y.p(), x.q() + y.q());
  if (out.block_count() == 0) return out;
  MultiIndex hs, as;
  for (int a = 0; a < x.block_count(); ++a) {
    if (x.block(a).isZero(0.0)) continue;
    auto [hi, ai] = x.indices_of(a);
    for (int b = 0; b < y.block_count(); ++b) {
      if (y.block(b).isZero(0.0)) continue;
      auto [hj, aj] = y.indices_of(b);
      int s1 = wedge_sign(concat(hi, hj), hs);
      if (s1 == 0) continue;
      int s2 = wedge_sign(concat(ai, aj), as);
      if (s2 == 0) continue;
      // dq̄^J ∧ dq_I' = (−1)^{|J||I'|} dq_I' ∧ dq̄^J
      int s0 = ((ai.size() * hj.size()) % 2 == 0) ? 1 : -1;
      out.at(hs, as) += static_cast<Real>(s0 * s1 * s2) * (x.block(a) * y.block(b));
    }
  }
  return out;
}

GradedElement bracket(const GradedElement& x, const GradedElement& y) {
  GradedElement xy = product(x, y);
  GradedElement yx = product(y, x);
  if ((x.degree() * y.degree()) % 2 == 0) return xy - yx;
  return xy + yx;
}

GradedElement adjoint(const GradedElement& x) {
  GradedElement out(x.n(), x.r(), x.q(), x.p());
  const Real s = ((x.p() * x.q()) % 2 == 0) ? 1.0 : -1.0;
  for (int k = 0; k < x.block_count(); ++k) {
    auto [hi, ai] = x.indices_of(k);
    out.at(ai, hi) = s * x.block(k).adjoint();
  }
  return out;
}

GradedElement contract_kahler(const GradedElement& x) {
  if (x.p() < 1 || x.q() < 1)
    throw ValidationError("Λ needs p ≥ 1 and q ≥ 1, got (" + std::to_string(x.p()) + "," +
                          std::to_string(x.q()) + ")");
  GradedElement out(x.n(), x.r(), x.p() - 1, x.q() - 1);
  const Real parity = ((x.p() - 1) % 2 == 0) ? 1.0 : -1.0;
  MultiIndex hs, as;
  for (int k = 0; k < out.block_count(); ++k) {
    auto [hi, ai] = out.indices_of(k);
    for (int j = 0; j < x.n(); ++j) {
      int s1 = wedge_sign(concat({j}, hi), hs);
      if (s1 == 0) continue;
      int s2 = wedge_sign(concat({j}, ai), as);
      if (s2 == 0) continue;
      out.block(k) += parity * static_cast<Real>(s1 * s2) * x.at(hs, as);
    }
  }
  return out;
}

GradedElement kahler_form(int n, const Mat& s) {
  GradedElement out(n, static_cast<int>(s.rows()), 1, 1);
  for (int i = 0; i < n; ++i) out.at({i}, {i}) = s;
  return out;
}

Complex hermitian_product(const GradedElement& x, const GradedElement& y) {
  if (!x.same_shape(y)) throw ValidationError("degree mismatch in inner product");
  Complex s = 0;
  for (int k = 0; k < x.block_count(); ++k) s += (x.block(k).array() * y.block(k).array().conjugate()).sum();
  return form_factor(x.p(), x.q()) * s;
}

InnerProducts inner_products(const GradedElement& x, const GradedElement& y) {
  Complex h = hermitian_product(x, y);
  return {h, h.real(), h.imag()};
}

Real norm(const GradedElement& x) {
  return std::sqrt(form_factor(x.p(), x.q()) * x.coefficient_norm2());
}

Eigen::Index vector_size(int n, int r, int p, int q) {
  return static_cast<Eigen::Index>(combinations(n, p).size() * combinations(n, q).size()) * r * r;
}

Vec to_vector(const GradedElement& x) {
  const Eigen::Index rr = static_cast<Eigen::Index>(x.r()) * x.r();
  Vec v(static_cast<Eigen::Index>(x.block_count()) * rr);
  const Real w = std::sqrt(form_factor(x.p(), x.q()));
  for (int k = 0; k < x.block_count(); ++k) {
    const Mat& b = x.block(k);
    for (int a = 0; a < x.r(); ++a)
      for (int c = 0; c < x.r(); ++c) v(k * rr + a * x.r() + c) = w * b(a, c);
  }
  return v;
}

GradedElement from_vector(const Vec& v, int n, int r, int p, int q) {
  GradedElement x(n, r, p, q);
  const Eigen::Index rr = static_cast<Eigen::Index>(r) * r;
  if (v.size() != static_cast<Eigen::Index>(x.block_count()) * rr)
    throw ValidationError("vector length does not match M^{p,q}");
  const Real w = 1.0 / std::sqrt(form_factor(p, q));
  for (int k = 0; k < x.block_count(); ++k)
    for (int a = 0; a < r; ++a)
      for (int c = 0; c < r; ++c) x.block(k)(a, c) = w * v(k * rr + a * r + c);
  return x;
}

std::string index_key(const MultiIndex& holo, const MultiIndex& antiholo) {
  std::ostringstream os;
  for (size_t i = 0; i < holo.size(); ++i) os << (i ? "," : "") << holo[i] + 1;
  os << '|';
  for (size_t i = 0; i < antiholo.size(); ++i) os << (i ? "," : "") << antiholo[i] + 1;
  return os.str();
}

nlohmann::json to_json(const GradedElement& x) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (int k = 0; k < x.block_count(); ++k) {
    auto [hi, ai] = x.indices_of(k);
    nlohmann::json rows = nlohmann::json::array();
    const Mat& b = x.block(k);
    for (Eigen::Index a = 0; a < b.rows(); ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < b.cols(); ++c) row.push_back({b(a, c).real(), b(a, c).imag()});
      rows.push_back(std::move(row));
    }
    coeffs[index_key(hi, ai)] = std::move(rows);
  }
  return {{"n", x.n()}, {"r", x.r()}, {"p", x.p()}, {"q", x.q()}, {"coeffs", std::move(coeffs)}};
}

namespace {

MultiIndex parse_indices(const std::string& s) {
  MultiIndex out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok) - 1);
  return out;
}

}  // namespace

GradedElement graded_from_json(const nlohmann::json& j) {
  try {
    GradedElement x(j.at("n").get<int>(), j.at("r").get<int>(), j.at("p").get<int>(),
                    j.at("q").get<int>());
    for (const auto& [key, rows] : j.at("coeffs").items()) {
      auto bar = key.find('|');
      if (bar == std::string::npos) throw ValidationError("index key '" + key + "' lacks '|'");
      Mat& b = x.at(parse_indices(key.substr(0, bar)), parse_indices(key.substr(bar + 1)));
      for (Eigen::Index a = 0; a < b.rows(); ++a)
        for (Eigen::Index c = 0; c < b.cols(); ++c) {
          const auto& e = rows.at(static_cast<size_t>(a)).at(static_cast<size_t>(c));
          b(a, c) = Complex(e.at(0).get<Real>(), e.at(1).get<Real>());
        }
    }
    return x;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed graded element JSON: ") + e.what());
  }
}

}  // namespace orbmod
