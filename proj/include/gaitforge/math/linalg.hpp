#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "gaitforge/math/dual.hpp"

namespace gaitforge::math {

// Gaussian elimination with partial pivoting, templated so it also runs on
// forward-mode scalars (pivot choice compares values only).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> solve_dense(
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A,
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> b) {
  using std::abs;
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || b.rows() != n) throw std::invalid_argument("solve_dense: shape mismatch");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(value(A(k, k)));
    for (int i = k + 1; i < n; ++i) {
      const double m = std::abs(value(A(i, k)));
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (best == 0.0) throw std::runtime_error("solve_dense: singular matrix");
    if (piv != k) {
      A.row(k).swap(A.row(piv));
      b.row(k).swap(b.row(piv));
    }
    const Scalar inv = Scalar(1.0) / A(k, k);
    for (int i = k + 1; i < n; ++i) {
      const Scalar f = A(i, k) * inv;
      for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      for (int j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x = b;
  for (int k = n - 1; k >= 0; --k) {
    for (int j = 0; j < x.cols(); ++j) {
      Scalar s = x(k, j);
      for (int i = k + 1; i < n; ++i) s -= A(k, i) * x(i, j);
      x(k, j) = s / A(k, k);
    }
  }
  return x;
}

// Reciprocal condition number of a small symmetric PSD matrix via its
// eigenvalue spread.
inline double rcond_spd(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (hi <= 0.0) return 0.0;
  return lo / hi;
}

// Wrap to (-pi, pi].
inline double wrap_angle(double a) {
  return a - 2.0 * M_PI * std::ceil((a - M_PI) / (2.0 * M_PI));
}

}  // namespace gaitforge::math
