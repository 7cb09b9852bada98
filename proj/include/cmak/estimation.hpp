#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cmak {

/// Observations Y_{delta}, Y_{2 delta}, ..., Y_{n delta}.
struct SampledSeries {
  double delta = 1.0;
  Eigen::VectorXd values;
  bool mean_removed = false;

  /// Validates n >= 2, delta > 0 and finiteness.
  static SampledSeries create(double delta, Eigen::VectorXd values, bool mean_removed = false);
  Eigen::Index n() const { return values.size(); }
};

enum class AcvfSource { sample, exact_model };

struct AcvfSequence {
  /// gamma(0), ..., gamma(h_max).
  Eigen::VectorXd gamma;
  AcvfSource source = AcvfSource::sample;
  /// Number of observations behind a sample estimate.
  std::optional<Eigen::Index> n_obs;

  static AcvfSequence exact(Eigen::VectorXd gamma);
  Eigen::Index size() const { return gamma.size(); }
};

/// Biased sample autocovariance (divisor n) at lags 0..h_max; uses an FFT for long series.
AcvfSequence sample_acvf(const SampledSeries& series, Eigen::Index h_max);

struct InnovationsFit {
  int m = 0;
  /// theta[k - 1](j - 1) = theta_{k, j}, 1 <= j <= k <= m.
  std::vector<Eigen::VectorXd> theta;
  /// v_0, ..., v_m.
  Eigen::VectorXd v;

  double theta_at(int k, int j) const { return theta[k - 1](j - 1); }
  /// 1, theta_{m,1}, ..., theta_{m,m}.
  Eigen::VectorXd last_row() const;
};

InnovationsFit innovations_algorithm(const AcvfSequence& acvf, int m);

struct DurbinLevinsonFit {
  /// phi_1..phi_m of Y_t = sum phi_k Y_{t-k} + Z_t.
  Eigen::VectorXd phi;
  /// Partial autocorrelations phi_{k,k}, k = 1..m.
  Eigen::VectorXd pacf;
  double tau2 = 0.0;
};

DurbinLevinsonFit durbin_levinson(const AcvfSequence& acvf, int m);

/// Coefficients beta_0..beta_{j_max} of 1 / (1 - phi_1 z - ... - phi_m z^m); NonCausalAR when that
/// polynomial has a zero in the closed unit disc.
Eigen::VectorXd ar_to_ma(const Eigen::VectorXd& phi, Eigen::Index j_max);

enum class KernelMethod { innovations, durbin_levinson };

enum class MRule {
  /// m = 3N, N the number of kernel grid points.
  three_n,
  /// m = min(3N, floor(n^{1/3})).
  theorem,
};

struct KernelEstimateOptions {
  KernelMethod method = KernelMethod::durbin_levinson;
  std::optional<int> m;
  MRule m_rule = MRule::three_n;
  double offset_h = 0.5;
};

struct KernelEstimate {
  double delta = 0.0;
  double offset_h = 0.5;
  /// Estimates at (j + h) delta, j = 0..N.
  Eigen::VectorXd g_hat;
  /// Plug-in standard errors sqrt(sum_{i<j} theta_i^2 v / (n delta)); empty without n.
  Eigen::VectorXd band;
  KernelMethod method = KernelMethod::durbin_levinson;
  int m_used = 0;
  /// v_m (innovations) or tau^2 (Durbin-Levinson).
  double innovation_variance = 0.0;
  std::optional<Eigen::Index> n_obs;
  std::vector<std::string> warnings;

  Eigen::VectorXd times() const;
  /// Step-function reading: g_hat_j on [j delta, (j+1) delta), zero outside the table.
  double operator()(double t) const;
};

/// N = floor(t_max / delta) + 1 grid points.
KernelEstimate estimate_kernel(const SampledSeries& series, double t_max, const KernelEstimateOptions& options = {});
KernelEstimate estimate_kernel(const AcvfSequence& acvf, double delta, double t_max,
                               const KernelEstimateOptions& options = {});

/// sqrt(int_0^{t_j} g^2 / (n delta)) at t_j = (j + h) delta, trapezoid rule on the estimate grid,
/// using g_ref instead of the estimate when given.
Eigen::VectorXd clt_band(const KernelEstimate& estimate, const std::function<double(double)>& g_ref = {});

/// Band from known Wold coefficients: sqrt(sum_{i<j} psi_i^2 sigma2_delta / (n delta)).
Eigen::VectorXd wold_band(const Eigen::VectorXd& psi, double sigma2_delta, Eigen::Index n, double delta);

}  // namespace cmak
