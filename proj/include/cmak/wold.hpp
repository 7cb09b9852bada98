#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Dense>

#include "cmak/carma.hpp"

namespace cmak {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kMaxAlphaOrder = 12;

/// alpha_k(x), the coefficient of z^{2k+1} in sinh(z) / (cosh(z) - 1 + x):
///   alpha_k(x) = numerator(x) / x^{k+1},
///   numerator(x) = prod_i (x - xi_{k,i}) / (2k+1)!.
struct AlphaPolynomial {
  int k = 0;
  /// Exact numerator coefficients, ascending powers of x (degree k).
  std::vector<Rational> numerator;
  /// (2k+1)!, the inverse leading coefficient of the numerator.
  BigInt factorial;
  /// Zeros xi_{k,1..k} of the numerator, sorted by (real, imag).
  Eigen::VectorXcd xi;

  /// Numerator scaled to be monic, as doubles.
  Eigen::VectorXd monic_numerator() const;
  double evaluate(double x) const;
};

/// Exact power-series division of sinh by (cosh - 1 + x); throws OrderTooLarge for k > 12.
AlphaPolynomial alpha_polynomial(int k);

/// Root of eta^2 - 2(xi - 1) eta + 1 with modulus below one.
Complex eta_of_xi(Complex xi);

/// Leading-order factorization of the sampled moving-average operator:
///   theta(B) ~ prod_i (1 + eta_i B) prod_k (1 - zeta_k B),  zeta_k = 1 + mu_k delta.
struct MaFactorization {
  double delta = 0.0;
  Eigen::VectorXcd eta;
  Eigen::VectorXcd zeta;
  double sigma2_delta = 0.0;
};

MaFactorization ma_factorization(const CarmaModel& model, double delta);

/// Real coefficients of prod_i (1 + eta_i B) prod_k (1 - zeta_k B), ascending in B.
Eigen::VectorXd expand_ma_polynomial(const MaFactorization& factorization);

/// Leading term delta^{2(p-q)-1} e^{-a_1 delta} sigma^2 / ([2(p-q)-1]! prod eta(xi_i) prod zeta_k).
double asymptotic_sigma2_delta(const CarmaModel& model, double delta);

/// [(2k-1)! prod_i eta(xi_{k-1,i})]^{-1}, the constant in sigma_delta^2 ~ sigma^2 C delta^{2k-1}
/// for models with p - q = k.
double carma_wold_constant(int p_minus_q);

/// Leading-order Wold coefficients psi_0..psi_{j_max}, rescaled so that psi_0 = 1.
Eigen::VectorXd asymptotic_psi(const CarmaModel& model, double delta, Eigen::Index j_max);

/// Step-function approximation g^delta(t) = (sigma_delta / sqrt(delta)) psi_{floor(t / delta)}.
struct WoldApprox {
  double delta = 0.0;
  Eigen::VectorXd psi;
  double sigma2_delta = 0.0;

  double scale() const;
  /// Zero for t < 0 and beyond the tabulated horizon.
  double operator()(double t) const;
};

WoldApprox wold_kernel_approx(const CarmaModel& model, double delta, double t_max);

}  // namespace cmak
