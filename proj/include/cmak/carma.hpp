#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "cmak/polynomial.hpp"

namespace cmak {

/// Pairwise distance below which two roots count as coincident.
inline constexpr double kRootSeparationTol = 1e-9;
/// Spread applied to coincident autoregressive roots when perturbation is requested.
inline constexpr double kRootPerturbation = 1e-6;
/// Imaginary residue allowed on outputs that are real in exact arithmetic.
inline constexpr double kRealnessTol = 1e-10;

/// Roots of a real polynomial: closed under conjugation, sorted by (real, imag).
struct ComplexRootSet {
  Eigen::VectorXcd roots;

  ComplexRootSet() = default;
  explicit ComplexRootSet(Eigen::VectorXcd values);

  Eigen::Index size() const { return roots.size(); }
  const Complex& operator[](Eigen::Index i) const { return roots(i); }
  /// Smallest pairwise distance, +inf for fewer than two roots.
  double min_separation() const;
};

struct CarmaOptions {
  /// Spread coincident autoregressive roots by +-1e-6 (imaginary direction for real clusters)
  /// instead of rejecting the model.
  bool perturb_multiple_roots = false;
};

/// CARMA(p, q) model a(D) Y = sigma b(D) DL with
///   a(z) = z^p + a_1 z^{p-1} + ... + a_p,   b(z) = b_0 + b_1 z + ... + b_q z^q,  b_q = 1.
/// Immutable after construction; every instance is causal, minimum phase, with distinct
/// autoregressive roots and no root shared between a and b.
class CarmaModel {
 public:
  /// ar = [a_1, ..., a_p], ma = [b_0, ..., b_q].
  static CarmaModel create(const Eigen::VectorXd& ar, const Eigen::VectorXd& ma, double sigma2,
                           CarmaOptions options = {});
  /// Build from the zeros of a(z) and b(z); each set must be closed under conjugation.
  static CarmaModel from_roots(const Eigen::VectorXcd& ar_roots, const Eigen::VectorXcd& ma_roots, double sigma2,
                               CarmaOptions options = {});

  int p() const { return static_cast<int>(ar_.size()); }
  int q() const { return static_cast<int>(ma_.size()) - 1; }
  const Eigen::VectorXd& ar() const { return ar_; }
  const Eigen::VectorXd& ma() const { return ma_; }
  double sigma2() const { return sigma2_; }
  const ComplexRootSet& ar_roots() const { return ar_roots_; }
  const ComplexRootSet& ma_roots() const { return ma_roots_; }
  bool perturbed() const { return perturbed_; }

  Complex a(Complex z) const;
  Complex b(Complex z) const;
  /// a'(lambda_r) = prod_{m != r} (lambda_r - lambda_m).
  Complex a_prime_at_root(Eigen::Index r) const;
  /// b(lambda_r) / a'(lambda_r), the kernel weight of root r.
  const Eigen::VectorXcd& kernel_weights() const { return weights_; }

  std::string describe() const;

 private:
  CarmaModel() = default;
  void finalize();

  Eigen::VectorXd ar_;
  Eigen::VectorXd ma_;
  double sigma2_ = 1.0;
  ComplexRootSet ar_roots_;
  ComplexRootSet ma_roots_;
  Eigen::VectorXcd weights_;
  bool perturbed_ = false;
};

/// g(t) = sum_r b(lambda_r)/a'(lambda_r) e^{lambda_r t} for t > 0, zero otherwise.
double carma_kernel(const CarmaModel& model, double t);

/// sigma^2 |b(i w)|^2 / (2 pi |a(i w)|^2).
double carma_spectral_density(const CarmaModel& model, double omega);

/// gamma(h) = sigma^2 int_0^inf g(u) g(u + |h|) du, by residues.
double carma_autocovariance(const CarmaModel& model, double h);

/// gamma(k delta), k = 0..count-1.
Eigen::VectorXd carma_autocovariance_grid(const CarmaModel& model, double delta, Eigen::Index count);

/// Spectral density of the sampled sequence Y_{n delta} on [-pi, pi], as minus sigma^2/(2 pi)
/// times the sum of residues at the autoregressive roots.
double sampled_spectral_density_exact(const CarmaModel& model, double delta, double omega);

/// Coefficients c_1..c_p of prod_j (1 - e^{lambda_j delta} z) = 1 + c_1 z + ... + c_p z^p.
Eigen::VectorXd sampled_ar_polynomial(const CarmaModel& model, double delta);

enum class KernelKind { carma, gamma, custom_table };

/// Causal kernel handle t -> g(t), zero on (-inf, 0].
class CmaKernel {
 public:
  static CmaKernel carma(const CarmaModel& model);
  /// t^{nu-1} e^{-lambda t}.
  static CmaKernel gamma(double nu, double lambda);
  /// Piecewise-constant table: value[j] on [j delta, (j+1) delta), zero beyond.
  static CmaKernel table(double delta, Eigen::VectorXd values);

  double operator()(double t) const { return t <= 0.0 ? 0.0 : eval_(t); }
  KernelKind kind() const { return kind_; }
  /// int_0^inf g^2 by quadrature.
  double squared_norm() const;

 private:
  CmaKernel(KernelKind kind, std::function<double(double)> eval) : kind_(kind), eval_(std::move(eval)) {}
  KernelKind kind_;
  std::function<double(double)> eval_;
};

}  // namespace cmak
