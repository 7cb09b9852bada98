#include "cmak/estimation.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "cmak/error.hpp"
#include "cmak/quadrature.hpp"

namespace cmak {

namespace {

// Below this many multiply-adds the direct lag sum beats the FFT round trip.
constexpr double kDirectAcvfWork = 2e7;

Eigen::VectorXd acvf_direct(const Eigen::VectorXd& x, Eigen::Index h_max) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd out(h_max + 1);
  for (Eigen::Index h = 0; h <= h_max; ++h) out(h) = x.head(n - h).dot(x.tail(n - h)) / double(n);
  return out;
}

Eigen::VectorXd acvf_fft(const Eigen::VectorXd& x, Eigen::Index h_max) {
  const Eigen::Index n = x.size();
  Eigen::Index size = 1;
  while (size < 2 * n) size *= 2;
  std::vector<double> padded(size, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) padded[i] = x(i);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  for (auto& c : spectrum) c = std::norm(c);
  std::vector<double> circular;
  fft.inv(circular, spectrum);
  Eigen::VectorXd out(h_max + 1);
  for (Eigen::Index h = 0; h <= h_max; ++h) out(h) = circular[h] / double(n);
  return out;
}

void check_acvf(const AcvfSequence& acvf, int m) {
  require(m >= 0, ErrorCode::InvalidArgument, "order must be nonnegative");
  if (m >= acvf.size()) {
    std::ostringstream msg;
    msg << "order " << m << " needs " << m + 1 << " autocovariances, have " << acvf.size();
    fail(ErrorCode::LagTooLarge, msg.str());
  }
  require(acvf.gamma(0) > 0.0, ErrorCode::NonPositiveV, "gamma(0) must be positive");
}

Eigen::VectorXd cumulative_band(const Eigen::VectorXd& coeffs, double variance, Eigen::Index n, double delta) {
  Eigen::VectorXd band(coeffs.size());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    band(j) = std::sqrt(acc * variance / (double(n) * delta));
    acc += coeffs(j) * coeffs(j);
  }
  return band;
}

int choose_order(const KernelEstimateOptions& options, Eigen::Index points, std::optional<Eigen::Index> n_obs,
                 std::vector<std::string>& warnings) {
  if (options.m) return *options.m;
  const int three_n = int(3 * points);
  if (!n_obs) return three_n;
  const double cube_root = std::cbrt(double(*n_obs));
  if (options.m_rule == MRule::theorem) return std::min(three_n, int(std::floor(cube_root)));
  if (double(three_n) > cube_root) {
    std::ostringstream msg;
    msg << "m = 3N = " << three_n << " exceeds n^(1/3) = " << cube_root
        << "; the consistency theorem asks for m = o(n^(1/3))";
    warnings.push_back(msg.str());
  }
  return three_n;
}

KernelEstimate build_estimate(const AcvfSequence& acvf, double delta, double t_max,
                              const KernelEstimateOptions& options, std::vector<std::string> warnings,
                              bool default_order) {
  const Eigen::Index points = Eigen::Index(std::floor(t_max / delta + 1e-9));
  const int m = choose_order(options, points, acvf.n_obs, warnings);
  if (m >= acvf.size() || m < 1) {
    std::ostringstream msg;
    msg << "order m = " << m << " is not supported by " << acvf.size() << " autocovariances"
        << (default_order ? "; pass m explicitly" : "");
    fail(default_order ? ErrorCode::MRequired : ErrorCode::LagTooLarge, msg.str());
  }

  KernelEstimate est;
  est.delta = delta;
  est.offset_h = options.offset_h;
  est.method = options.method;
  est.m_used = m;
  est.n_obs = acvf.n_obs;

  Eigen::VectorXd coeffs;
  double variance = 0.0;
  if (options.method == KernelMethod::innovations) {
    if (points > m) {
      std::ostringstream msg;
      msg << "innovations estimator reaches lag " << points << " but m = " << m;
      fail(ErrorCode::MRequired, msg.str());
    }
    const InnovationsFit fit = innovations_algorithm(acvf, m);
    coeffs = fit.last_row().head(points + 1);
    variance = fit.v(m);
  } else {
    const DurbinLevinsonFit fit = durbin_levinson(acvf, m);
    coeffs = ar_to_ma(fit.phi, points);
    variance = fit.tau2;
  }
  est.innovation_variance = variance;
  est.g_hat = std::sqrt(variance / delta) * coeffs;
  if (acvf.n_obs) est.band = cumulative_band(coeffs, variance, *acvf.n_obs, delta);
  est.warnings = std::move(warnings);
  return est;
}

void check_estimate_args(double delta, double t_max, const KernelEstimateOptions& options) {
  require(delta > 0.0 && t_max >= 0.0, ErrorCode::DomainError, "delta must be positive and t_max nonnegative");
  require(options.offset_h >= 0.0 && options.offset_h < 1.0, ErrorCode::DomainError, "offset h must lie in [0, 1)");
  require(!options.m || *options.m >= 1, ErrorCode::InvalidArgument, "m must be positive");
}

}  // namespace

SampledSeries SampledSeries::create(double delta, Eigen::VectorXd values, bool mean_removed) {
  require(delta > 0.0 && std::isfinite(delta), ErrorCode::DomainError, "sampling interval must be positive");
  require(values.size() >= 2, ErrorCode::InvalidArgument, "series needs at least two observations");
  require(values.allFinite(), ErrorCode::InvalidArgument, "series contains non-finite values");
  return SampledSeries{delta, std::move(values), mean_removed};
}

AcvfSequence AcvfSequence::exact(Eigen::VectorXd gamma) {
  require(gamma.size() >= 1 && gamma(0) > 0.0, ErrorCode::InvalidArgument, "gamma(0) must be positive");
  return AcvfSequence{std::move(gamma), AcvfSource::exact_model, std::nullopt};
}

AcvfSequence sample_acvf(const SampledSeries& series, Eigen::Index h_max) {
  const Eigen::Index n = series.n();
  if (h_max < 0 || h_max >= n) {
    std::ostringstream msg;
    msg << "lag " << h_max << " needs more than " << n << " observations";
    fail(ErrorCode::LagTooLarge, msg.str());
  }
  const Eigen::VectorXd centered = series.values.array() - series.values.mean();
  AcvfSequence out;
  out.source = AcvfSource::sample;
  out.n_obs = n;
  out.gamma = double(n) * double(h_max + 1) <= kDirectAcvfWork ? acvf_direct(centered, h_max)
                                                               : acvf_fft(centered, h_max);
  return out;
}

Eigen::VectorXd InnovationsFit::last_row() const {
  Eigen::VectorXd row(m + 1);
  row(0) = 1.0;
  if (m > 0) row.tail(m) = theta[m - 1];
  return row;
}

InnovationsFit innovations_algorithm(const AcvfSequence& acvf, int m) {
  check_acvf(acvf, m);
  const Eigen::VectorXd& g = acvf.gamma;
  InnovationsFit fit;
  fit.m = m;
  fit.v.resize(m + 1);
  fit.v(0) = g(0);
  fit.theta.reserve(m);
  for (int k = 1; k <= m; ++k) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(k);
    // row(k - j - 1) = theta_{k, k-j}
    for (int j = 0; j < k; ++j) {
      double acc = g(k - j);
      for (int i = 0; i < j; ++i) acc -= fit.theta[j - 1](j - i - 1) * row(k - i - 1) * fit.v(i);
      row(k - j - 1) = acc / fit.v(j);
    }
    double v = g(0);
    for (int j = 0; j < k; ++j) v -= row(k - j - 1) * row(k - j - 1) * fit.v(j);
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "innovations variance v_" << k << " = " << v << " is not positive";
      fail(ErrorCode::NonPositiveV, msg.str());
    }
    fit.v(k) = v;
    fit.theta.push_back(std::move(row));
  }
  return fit;
}

DurbinLevinsonFit durbin_levinson(const AcvfSequence& acvf, int m) {
  check_acvf(acvf, m);
  const Eigen::VectorXd& g = acvf.gamma;
  DurbinLevinsonFit fit;
  fit.phi = Eigen::VectorXd::Zero(m);
  fit.pacf = Eigen::VectorXd::Zero(m);
  double v = g(0);
  Eigen::VectorXd prev(m);
  for (int k = 1; k <= m; ++k) {
    double acc = g(k);
    for (int j = 1; j < k; ++j) acc -= fit.phi(j - 1) * g(k - j);
    const double kappa = acc / v;
    prev.head(k - 1) = fit.phi.head(k - 1);
    for (int j = 1; j < k; ++j) fit.phi(j - 1) = prev(j - 1) - kappa * prev(k - j - 1);
    fit.phi(k - 1) = kappa;
    fit.pacf(k - 1) = kappa;
    v *= 1.0 - kappa * kappa;
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "Durbin-Levinson variance at order " << k << " is " << v;
      fail(ErrorCode::NonPositiveV, msg.str());
    }
  }
  fit.tau2 = v;
  return fit;
}

Eigen::VectorXd ar_to_ma(const Eigen::VectorXd& phi, Eigen::Index j_max) {
  require(j_max >= 0, ErrorCode::InvalidArgument, "j_max must be nonnegative");
  // Schur-Cohn step-down: 1 - sum phi_k z^k is zero-free on the closed unit disc iff every
  // reflection coefficient has modulus below one.
  Eigen::VectorXd a = phi;
  for (Eigen::Index k = a.size(); k >= 1; --k) {
    const double kappa = a(k - 1);
    if (!(std::abs(kappa) < 1.0)) {
      std::ostringstream msg;
      msg << "autoregressive polynomial has a zero in the closed unit disc (reflection coefficient " << kappa
          << " at order " << k << ")";
      fail(ErrorCode::NonCausalAR, msg.str());
    }
    Eigen::VectorXd lower(k - 1);
    for (Eigen::Index j = 1; j < k; ++j) lower(j - 1) = (a(j - 1) + kappa * a(k - j - 1)) / (1.0 - kappa * kappa);
    a = lower;
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(j_max + 1);
  beta(0) = 1.0;
  const Eigen::Index m = phi.size();
  for (Eigen::Index j = 1; j <= j_max; ++j) {
    double acc = 0.0;
    for (Eigen::Index k = 1; k <= std::min(j, m); ++k) acc += phi(k - 1) * beta(j - k);
    beta(j) = acc;
  }
  return beta;
}

Eigen::VectorXd KernelEstimate::times() const {
  Eigen::VectorXd t(g_hat.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) t(j) = (double(j) + offset_h) * delta;
  return t;
}

double KernelEstimate::operator()(double t) const {
  if (t < 0.0) return 0.0;
  const double cell = std::floor(t / delta);
  if (cell >= double(g_hat.size())) return 0.0;
  return g_hat(Eigen::Index(cell));
}

KernelEstimate estimate_kernel(const SampledSeries& series, double t_max, const KernelEstimateOptions& options) {
  check_estimate_args(series.delta, t_max, options);
  std::vector<std::string> warnings;
  const Eigen::Index points = Eigen::Index(std::floor(t_max / series.delta + 1e-9));
  const int m = choose_order(options, points, series.n(), warnings);
  if (m >= series.n()) {
    std::ostringstream msg;
    msg << "order m = " << m << " needs more than " << series.n() << " observations"
        << (options.m ? "" : "; pass m explicitly");
    fail(options.m ? ErrorCode::LagTooLarge : ErrorCode::MRequired, msg.str());
  }
  const AcvfSequence acvf = sample_acvf(series, m);
  KernelEstimateOptions fixed = options;
  fixed.m = m;
  return build_estimate(acvf, series.delta, t_max, fixed, std::move(warnings), !options.m);
}

KernelEstimate estimate_kernel(const AcvfSequence& acvf, double delta, double t_max,
                               const KernelEstimateOptions& options) {
  check_estimate_args(delta, t_max, options);
  return build_estimate(acvf, delta, t_max, options, {}, !options.m);
}

Eigen::VectorXd clt_band(const KernelEstimate& estimate, const std::function<double(double)>& g_ref) {
  require(estimate.n_obs.has_value(), ErrorCode::InvalidArgument, "the CLT band needs the sample size");
  const Eigen::VectorXd t = estimate.times();
  const double scale = double(*estimate.n_obs) * estimate.delta;
  Eigen::VectorXd out(t.size());
  double acc = 0.0;
  if (g_ref) {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-12;
    cfg.rel_tol = 1e-10;
    cfg.throw_on_failure = false;
    auto sq = [&g_ref](double u) {
      const double v = g_ref(u);
      return v * v;
    };
    double left = 0.0;
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      acc += integrate(sq, left, t(j), cfg).value;
      left = t(j);
      out(j) = std::sqrt(acc / scale);
    }
    return out;
  }
  double left_t = 0.0;
  double left_sq = estimate.g_hat.size() > 0 ? estimate.g_hat(0) * estimate.g_hat(0) : 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    const double sq = estimate.g_hat(j) * estimate.g_hat(j);
    acc += 0.5 * (left_sq + sq) * (t(j) - left_t);
    left_t = t(j);
    left_sq = sq;
    out(j) = std::sqrt(acc / scale);
  }
  return out;
}

Eigen::VectorXd wold_band(const Eigen::VectorXd& psi, double sigma2_delta, Eigen::Index n, double delta) {
  require(n > 0 && delta > 0.0 && sigma2_delta > 0.0, ErrorCode::DomainError, "band inputs must be positive");
  return cumulative_band(psi, sigma2_delta, n, delta);
}

}  // namespace cmak
