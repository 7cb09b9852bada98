#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cmak {

using Complex = std::complex<double>;

// Coefficient vectors are stored in ascending powers: c(0) + c(1) z + ... + c(n) z^n.

/// Horner evaluation of an ascending-coefficient polynomial at a real or complex point.
template <typename Derived, typename Scalar>
auto polyval(const Eigen::MatrixBase<Derived>& coeffs, const Scalar& z) {
  using Coeff = typename Derived::Scalar;
  using Result = decltype(Coeff{} * z);
  Result acc{0};
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * z + Result(coeffs(k));
  return acc;
}

/// Derivative coefficients, ascending.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> polyder(const Eigen::MatrixBase<Derived>& coeffs) {
  const Eigen::Index n = coeffs.size();
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(n > 1 ? n - 1 : 1);
  if (n <= 1) {
    out.setZero();
    return out;
  }
  for (Eigen::Index k = 1; k < n; ++k) out(k - 1) = coeffs(k) * typename Derived::Scalar(double(k));
  return out;
}

/// Zeros of a real polynomial via companion-matrix eigenvalues, refined by a few Newton steps and
/// sorted by (real, imag). Leading coefficient must be nonzero.
Eigen::VectorXcd poly_roots(const Eigen::VectorXd& coeffs);

/// Same for complex coefficients (used for exact-numerator polynomials with large coefficients).
Eigen::VectorXcd poly_roots(const Eigen::VectorXcd& coeffs);

/// Ascending coefficients of the monic polynomial prod_i (z - r_i).
Eigen::VectorXcd poly_from_roots(const Eigen::VectorXcd& roots);

/// Ascending coefficients of prod_i (1 - w_i z).
Eigen::VectorXcd poly_from_reciprocal_factors(const Eigen::VectorXcd& w);

/// Lexicographic (real, imag) ordering.
void sort_roots(Eigen::VectorXcd& roots);

/// Drops imaginary parts after checking they are below tol * (1 + |re|) entrywise; throws DomainError
/// otherwise.
Eigen::VectorXd checked_real(const Eigen::VectorXcd& values, double tol);

double checked_real(Complex value, double tol);

}  // namespace cmak
