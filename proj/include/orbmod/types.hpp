#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace orbmod {

using Real = double;
using Complex = std::complex<Real>;

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Input that violates a documented precondition (bad spec, wrong degree,
/// point off the variety). Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure that could not reach a trustworthy answer
/// (rank ambiguity, non-convergence). Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const Complex kI{0.0, 1.0};

template <typename DerivedA, typename DerivedB>
auto commutator(const Eigen::MatrixBase<DerivedA>& a,
                const Eigen::MatrixBase<DerivedB>& b) {
  return (a * b - b * a).eval();
}

/// ‖M − M*‖_F
template <typename Derived>
Real hermitian_residual(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).norm();
}

/// Frobenius norm of a tuple of matrices.
inline Real tuple_norm(const std::vector<Mat>& ms) {
  Real s = 0;
  for (const auto& m : ms) s += m.squaredNorm();
  return std::sqrt(s);
}

}  // namespace orbmod
