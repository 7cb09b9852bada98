#include "cmak/spectral_theory.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cmak/error.hpp"

namespace cmak {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// B_{2j} / (2j)! for j = 1..6.
constexpr std::array<double, 6> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
};

void check_frequency(double omega) {
  require(std::isfinite(omega) && omega != 0.0, ErrorCode::DomainError, "frequency must be finite and nonzero");
  require(std::abs(omega) <= kPi * (1.0 + 1e-12), ErrorCode::DomainError, "frequency outside [-pi, pi]");
}

void check_alpha(double alpha) {
  require(alpha > 1.0 && std::isfinite(alpha), ErrorCode::DomainError, "regular variation index must exceed 1");
}

}  // namespace

double RegVaryingSpectrum::ell(double x) const {
  require(static_cast<bool>(density), ErrorCode::InvalidArgument, "spectrum has no evaluator");
  return density(x) * std::pow(x, alpha);
}

RegVaryingSpectrum RegVaryingSpectrum::carma(const CarmaModel& model) {
  RegVaryingSpectrum spec;
  spec.alpha = 2.0 * (model.p() - model.q());
  spec.ell_limit = model.sigma2() / kTwoPi;
  spec.density = [model](double w) { return carma_spectral_density(model, w); };
  return spec;
}

RegVaryingSpectrum RegVaryingSpectrum::ficarma(const CarmaModel& model, double d) {
  require(d > 0.0 && d < 0.5, ErrorCode::DomainError, "fractional order must lie in (0, 0.5)");
  RegVaryingSpectrum spec;
  spec.alpha = 2.0 * (model.p() + d - model.q());
  spec.ell_limit = model.sigma2() / kTwoPi;
  spec.density = [model, d](double w) { return ficarma_spectral_density(model, d, w); };
  return spec;
}

RegVaryingSpectrum RegVaryingSpectrum::gamma_kernel(double nu, double lambda, double sigma2) {
  require(nu > 0.5 && lambda > 0.0 && sigma2 > 0.0, ErrorCode::DomainError,
          "gamma kernel needs nu > 1/2, lambda > 0, sigma2 > 0");
  RegVaryingSpectrum spec;
  spec.alpha = 2.0 * nu;
  const double g = std::tgamma(nu);
  spec.ell_limit = sigma2 * g * g / kTwoPi;
  spec.density = [nu, lambda, sigma2](double w) { return gamma_kernel_spectral_density(nu, lambda, sigma2, w); };
  return spec;
}

double hurwitz_zeta(double s, double r) {
  if (!(s > 1.0 && s <= 64.0 && r > 0.0 && r <= 4.0)) {
    std::ostringstream msg;
    msg << "Hurwitz zeta requires 1 < s <= 64 and 0 < r <= 4, got s = " << s << ", r = " << r;
    fail(ErrorCode::DomainError, msg.str());
  }
  constexpr int n = 12;
  double head = 0.0;
  for (int k = n - 1; k >= 0; --k) head += std::pow(r + k, -s);
  const double x = r + n;
  double tail = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  // Rising factorial s (s+1) ... (s+2j-2) times x^{-s-2j+1}.
  double rising = s;
  double power = std::pow(x, -s - 1.0);
  for (int j = 1; j <= 6; ++j) {
    tail += kBernoulliOverFactorial[j - 1] * rising * power;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    power /= x * x;
  }
  return head + tail;
}

double log_aliasing_bracket(double alpha, double omega) {
  check_alpha(alpha);
  check_frequency(omega);
  const double w = std::abs(omega);
  const double x = std::min(w / kTwoPi, 0.5);
  const double images = hurwitz_zeta(alpha, 1.0 - x) + hurwitz_zeta(alpha, 1.0 + x);
  return -alpha * std::log(w) + std::log1p(std::pow(x, alpha) * images);
}

double aliasing_bracket(double alpha, double omega) { return std::exp(log_aliasing_bracket(alpha, omega)); }

double asymptotic_sampled_density(const RegVaryingSpectrum& spec, double delta, double omega) {
  check_alpha(spec.alpha);
  require(delta > 0.0, ErrorCode::DomainError, "sampling interval must be positive");
  check_frequency(omega);
  return spec.ell(1.0 / delta) * std::pow(delta, spec.alpha - 1.0) * aliasing_bracket(spec.alpha, omega);
}

double sampled_spectral_density_aliasing(const std::function<double(double)>& f_y, double delta, double omega,
                                         Eigen::Index terms) {
  require(delta > 0.0, ErrorCode::DomainError, "sampling interval must be positive");
  require(std::abs(omega) <= kPi * (1.0 + 1e-12), ErrorCode::DomainError, "frequency outside [-pi, pi]");
  require(terms >= 1, ErrorCode::InvalidArgument, "need at least one folding term");
  // Smallest terms first to limit rounding growth.
  double sum = 0.0;
  for (Eigen::Index k = terms; k >= 1; --k) {
    sum += f_y((omega + kTwoPi * double(k)) / delta) + f_y((omega - kTwoPi * double(k)) / delta);
  }
  sum += f_y(omega / delta);
  QuadratureConfig cfg;
  cfg.abs_tol = 0.0;
  cfg.rel_tol = 1e-12;
  cfg.throw_on_failure = false;
  const double edge = kTwoPi * (double(terms) + 0.5);
  // sum_{k > K} F(k) ~ int_{K+1/2}^inf F(k) dk, and dk = delta du / (2 pi).
  const double tail = integrate_to_infinity(f_y, (edge + omega) / delta, cfg).value +
                      integrate_to_infinity(f_y, (edge - omega) / delta, cfg).value;
  return sum / delta + tail / kTwoPi;
}

double c_alpha(double alpha) {
  require(alpha > 1.0 && alpha <= 40.0, ErrorCode::DomainError, "C_alpha defined here for 1 < alpha <= 40");
  // The bracket is even, so the mean of its log over [-pi, pi] is (1/pi) int_0^pi. Below eps only
  // the -alpha log w term matters; its integral there is closed form.
  const double eps = 1e-12;
  const double head = -alpha * eps * (std::log(eps) - 1.0);
  auto integrand = [alpha](double u) {
    const double w = std::exp(u);
    return log_aliasing_bracket(alpha, std::min(w, kPi)) * w;
  };
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-10;
  cfg.rel_tol = 1e-12;
  const double body = integrate(integrand, std::log(eps), std::log(kPi), cfg).value;
  return std::exp((head + body) / kPi);
}

double s_p_alpha(int p, double alpha) {
  require(p >= 1, ErrorCode::DomainError, "p must be a positive integer");
  require(alpha > 1.0 && alpha < 2.0 * p + 1.0, ErrorCode::DomainError, "S_{p,alpha} requires 1 < alpha < 2p + 1");
  const double e = 2.0 * p - alpha + 1.0;
  // On (0, eps]: (1 - cos w)^p |w + 2k pi|^{-alpha} ~ 2^{-p} w^{2p - alpha}.
  const double eps = 1e-6;
  const double head = std::pow(2.0, -p) * std::pow(eps, e) / e;
  auto integrand = [p, alpha](double u) {
    const double w = std::min(std::exp(u), kPi);
    const double s = std::sin(0.5 * w);
    return std::exp(p * std::log(2.0 * s * s) + log_aliasing_bracket(alpha, w)) * std::exp(u);
  };
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 1e-11;
  const double body = integrate(integrand, std::log(eps), std::log(kPi), cfg).value;
  return 2.0 * (head + body);
}

double kolmogorov_sigma2(const std::function<double(double)>& f_delta, const QuadratureConfig& cfg) {
  auto log_f = [&f_delta](double w) {
    const double v = f_delta(w);
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "spectral density " << v << " at frequency " << w << " is not positive and finite";
      fail(ErrorCode::NonPositiveDensity, msg.str());
    }
    return std::log(v);
  };
  const double left = integrate(log_f, -kPi, 0.0, cfg).value;
  const double right = integrate(log_f, 0.0, kPi, cfg).value;
  return kTwoPi * std::exp((left + right) / kTwoPi);
}

double wold_variance_asymptotics_rv(const RegVaryingSpectrum& spec, double delta) {
  check_alpha(spec.alpha);
  require(delta > 0.0, ErrorCode::DomainError, "sampling interval must be positive");
  return kTwoPi * c_alpha(spec.alpha) * spec.ell(1.0 / delta) * std::pow(delta, spec.alpha - 1.0);
}

double ficarma_spectral_density(const CarmaModel& model, double d, double omega) {
  require(d > 0.0 && d < 0.5, ErrorCode::DomainError, "fractional order must lie in (0, 0.5)");
  require(omega != 0.0 && std::isfinite(omega), ErrorCode::DomainError, "FICARMA density diverges at zero");
  return std::pow(std::abs(omega), -2.0 * d) * carma_spectral_density(model, omega);
}

double gamma_kernel_spectral_density(double nu, double lambda, double sigma2, double omega) {
  require(nu > 0.5 && lambda > 0.0 && sigma2 > 0.0, ErrorCode::DomainError,
          "gamma kernel needs nu > 1/2, lambda > 0, sigma2 > 0");
  const double g = std::tgamma(nu);
  return sigma2 * g * g / kTwoPi * std::pow(lambda * lambda + omega * omega, -nu);
}

double turbulence_spectrum(TurbulenceKind kind, const TurbulenceParams& params, double omega) {
  require(std::isfinite(omega), ErrorCode::DomainError, "frequency must be finite");
  const double w = std::abs(omega);
  switch (kind) {
    case TurbulenceKind::von_karman: {
      require(params.c > 0.0 && params.c_ell > 0.0 && params.mean_velocity > 0.0 && params.scaled_length > 0.0,
              ErrorCode::DomainError, "von Karman parameters must be positive");
      require(w > 0.0, ErrorCode::DomainError, "von Karman spectrum is evaluated away from zero");
      const double cut = params.c_ell / (params.scaled_length * params.scaled_length);
      return params.c * std::pow(params.mean_velocity, -2.0 / 3.0) * std::pow(w, -5.0 / 3.0) *
             std::pow(w * w / (w * w + cut), 17.0 / 6.0);
    }
    case TurbulenceKind::kaimal:
      require(params.variance > 0.0 && params.scaled_length > 0.0, ErrorCode::DomainError,
              "Kaimal parameters must be positive");
      return params.variance * 4.0 * params.scaled_length / std::pow(1.0 + 6.0 * params.scaled_length * w, 5.0 / 3.0);
  }
  fail(ErrorCode::InvalidArgument, "unknown turbulence spectrum");
}

double tail_index_diagnostic(const Eigen::VectorXd& freqs, const Eigen::VectorXd& values, double band_lo,
                             double band_hi) {
  require(freqs.size() == values.size(), ErrorCode::InvalidArgument, "frequency and value arrays differ in length");
  require(band_lo > 0.0 && band_hi > band_lo, ErrorCode::DomainError, "band must satisfy 0 < lo < hi");
  std::vector<double> x, y;
  for (Eigen::Index i = 0; i < freqs.size(); ++i) {
    if (freqs(i) < band_lo || freqs(i) > band_hi) continue;
    require(values(i) > 0.0, ErrorCode::NonPositiveDensity, "spectral values in the band must be positive");
    x.push_back(std::log(freqs(i)));
    y.push_back(std::log(values(i)));
  }
  if (x.size() < 8) {
    std::ostringstream msg;
    msg << "tail index needs at least 8 points in the band, found " << x.size();
    fail(ErrorCode::InsufficientPoints, msg.str());
  }
  const Eigen::Map<const Eigen::VectorXd> lx(x.data(), Eigen::Index(x.size()));
  const Eigen::Map<const Eigen::VectorXd> ly(y.data(), Eigen::Index(y.size()));
  const Eigen::VectorXd cx = lx.array() - lx.mean();
  const Eigen::VectorXd cy = ly.array() - ly.mean();
  return -cx.dot(cy) / cx.squaredNorm();
}

}  // namespace cmak
