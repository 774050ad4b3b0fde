#pragma once

#include <random>

#include "orbmod/equivariant.hpp"
#include "orbmod/graded.hpp"

namespace testing {

using namespace orbmod;

inline Mat random_matrix(Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = complex_normal(rng);
  return m;
}

inline GradedElement random_graded(Rng& rng, int n, int r, int p, int q) {
  GradedElement x(n, r, p, q);
  for (int k = 0; k < x.block_count(); ++k) x.block(k) = random_matrix(rng, r, r);
  return x;
}

/// Random Γ-invariant element of M^{p,q}.
inline GradedElement random_invariant(const GroupData& data, Rng& rng, int p, int q) {
  const auto& b = data.basis(p, q);
  Vec c(b.dim());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = complex_normal(rng);
  return b.combine(c);
}

inline Real max_abs(const GradedElement& x) {
  Real m = 0;
  for (int k = 0; k < x.block_count(); ++k) m = std::max(m, x.block(k).cwiseAbs().maxCoeff());
  return m;
}

/// The Q8 quaternion group acting on C² (free outside the origin).
inline const char* kQuaternionSpec =
    R"({"generators": [[[[0,1],[0,0]],[[0,0],[0,-1]]], [[[0,0],[-1,0]],[[1,0],[0,0]]]]})";

}  // namespace testing
