#include "cmak/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cmak/error.hpp"

namespace cmak {

namespace {

template <typename Coeffs>
Eigen::VectorXcd companion_roots(const Coeffs& coeffs) {
  Eigen::Index n = coeffs.size() - 1;
  while (n > 0 && std::abs(coeffs(n)) == 0.0) --n;
  require(n >= 0 && coeffs.size() > 0, ErrorCode::InvalidArgument, "empty polynomial");
  if (n == 0) return Eigen::VectorXcd(0);

  const Complex lead = Complex(coeffs(n));
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -Complex(coeffs(i)) / lead;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  require(solver.info() == Eigen::Success, ErrorCode::DomainError, "companion eigenvalue solver failed");
  Eigen::VectorXcd roots = solver.eigenvalues();

  Eigen::VectorXcd c(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) c(i) = Complex(coeffs(i));
  const Eigen::VectorXcd dc = polyder(c);
  for (Eigen::Index r = 0; r < n; ++r) {
    Complex z = roots(r);
    for (int it = 0; it < 4; ++it) {
      const Complex f = polyval(c, z);
      const Complex df = polyval(dc, z);
      if (std::abs(df) == 0.0) break;
      const Complex step = f / df;
      // Newton can jump between clustered roots; keep only steps that shrink the residual.
      const Complex candidate = z - step;
      if (std::abs(polyval(c, candidate)) < std::abs(f)) {
        z = candidate;
      } else {
        break;
      }
    }
    roots(r) = z;
  }
  sort_roots(roots);
  return roots;
}

}  // namespace

Eigen::VectorXcd poly_roots(const Eigen::VectorXd& coeffs) {
  Eigen::VectorXcd roots = companion_roots(coeffs);
  // Real input: restore exact conjugate symmetry lost to rounding.
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    if (std::abs(roots(i).imag()) < 1e-14 * (1.0 + std::abs(roots(i).real()))) {
      roots(i) = Complex(roots(i).real(), 0.0);
    }
  }
  sort_roots(roots);
  return roots;
}

Eigen::VectorXcd poly_roots(const Eigen::VectorXcd& coeffs) { return companion_roots(coeffs); }

Eigen::VectorXcd poly_from_roots(const Eigen::VectorXcd& roots) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(roots.size() + 1);
  c(0) = 1.0;
  for (Eigen::Index k = 0; k < roots.size(); ++k) {
    for (Eigen::Index i = k + 1; i >= 1; --i) c(i) = c(i - 1) - roots(k) * c(i);
    c(0) = -roots(k) * c(0);
  }
  return c;
}

Eigen::VectorXcd poly_from_reciprocal_factors(const Eigen::VectorXcd& w) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(w.size() + 1);
  c(0) = 1.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    for (Eigen::Index i = k + 1; i >= 1; --i) c(i) -= w(k) * c(i - 1);
  }
  return c;
}

void sort_roots(Eigen::VectorXcd& roots) {
  std::sort(roots.data(), roots.data() + roots.size(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

Eigen::VectorXd checked_real(const Eigen::VectorXcd& values, double tol) {
  Eigen::VectorXd out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) out(i) = checked_real(values(i), tol);
  return out;
}

double checked_real(Complex value, double tol) {
  if (std::abs(value.imag()) > tol * (1.0 + std::abs(value.real()))) {
    std::ostringstream msg;
    msg << "imaginary residue " << value.imag() << " exceeds tolerance for real part " << value.real();
    fail(ErrorCode::DomainError, msg.str());
  }
  return value.real();
}

}  // namespace cmak
