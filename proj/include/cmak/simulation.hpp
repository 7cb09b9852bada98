#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmak/carma.hpp"
#include "cmak/estimation.hpp"

namespace cmak {

/// Default ratio of output spacing to simulation spacing.
inline constexpr int kDefaultRefinement = 16;

/// g(t) = t^{nu-1} e^{-lambda t} on t > 0, driven by a Levy process with Var(L_1) = sigma2.
struct GammaKernelModel {
  double nu = 2.0;
  double lambda = 1.0;
  double sigma2 = 1.0;

  static GammaKernelModel create(double nu, double lambda, double sigma2 = 1.0);
  /// (2 lambda)^{1-2nu} Gamma(2nu - 1) sigma2.
  double variance() const;
  CmaKernel kernel() const { return CmaKernel::gamma(nu, lambda); }
};

/// gamma_Y(0) rho_Y(h) with the Whittle-Matern correlation
/// rho_Y(h) = 2^{3/2-nu} / Gamma(nu - 1/2) |lambda h|^{nu-1/2} K_{nu-1/2}(|lambda h|).
double gamma_acvf(const GammaKernelModel& model, double h);

/// Modified Bessel function of the second kind, int_0^inf e^{-x cosh t} cosh(nu t) dt.
double bessel_k(double nu, double x);

/// e^x K_nu(x), finite for large x.
double bessel_k_scaled(double nu, double x);

enum class DriverKind { gaussian, compound_poisson };

/// Compound Poisson jumps are N(0, 1/rate), so Var(L_1) = 1 for every driver.
struct Driver {
  DriverKind kind = DriverKind::gaussian;
  double rate = 0.0;
};

struct SimulationPlan {
  double fine_delta = 1.0 / 16.0;
  double out_delta = 1.0;
  Eigen::Index n_out = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  Driver driver;

  /// Validates out_delta / fine_delta as a positive integer.
  static SimulationPlan create(double out_delta, Eigen::Index n_out, std::uint64_t seed, int refinement = kDefaultRefinement,
                               Driver driver = {});
  Eigen::Index refinement() const;
};

struct SimulationDiagnostics {
  Eigen::Index embedding_size = 0;
  /// Sum of clipped negative eigenvalues over the largest eigenvalue.
  double clipped_fraction = 0.0;
  std::vector<std::string> warnings;
};

/// Circulant embedding of acvf(k * fine_delta) on the fine grid, then subsampling.
SampledSeries simulate_gaussian_cma(const std::function<double(double)>& acvf, const SimulationPlan& plan,
                                    SimulationDiagnostics* diagnostics = nullptr);

/// State-space CARMA path: exact Gaussian transition at out_delta for the Gaussian driver, fine-grid
/// Euler scheme for compound Poisson (refinement >= 16).
SampledSeries simulate_carma_statespace(const CarmaModel& model, const SimulationPlan& plan);

/// Companion-form state space: dX = A X dt + e dL, Y = b^T X.
struct CarmaStateSpace {
  Eigen::MatrixXd a;
  Eigen::VectorXd e;
  Eigen::VectorXd b;
  /// Stationary covariance for unit driving variance: A S + S A^T + e e^T = 0.
  Eigen::MatrixXd stationary_cov;

  static CarmaStateSpace from_model(const CarmaModel& model);
  Eigen::MatrixXd transition(double delta) const;
  /// int_0^delta e^{Au} e e^T e^{A^T u} du by Gauss-Legendre quadrature.
  Eigen::MatrixXd noise_cov(double delta) const;
};

/// Euler scheme X_{k+1} = e^{A d} X_k + e^{A d / 2} e dL_k on fine steps d with the given driver
/// increments (already scaled by sigma); returns b^T X after every `refinement` steps.
Eigen::VectorXd carma_euler_path(const CarmaStateSpace& ss, double fine_delta, const Eigen::VectorXd& increments,
                                 Eigen::Index refinement, const Eigen::VectorXd& x0);

}  // namespace cmak
