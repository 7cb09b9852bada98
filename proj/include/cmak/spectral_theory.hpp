#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "cmak/carma.hpp"
#include "cmak/quadrature.hpp"

namespace cmak {

/// Spectral density f_Y(w) = |w|^{-alpha} l(|w|) regularly varying at infinity with index -alpha.
struct RegVaryingSpectrum {
  double alpha = 2.0;
  /// lim_{w -> inf} l(w), when known.
  std::optional<double> ell_limit;
  std::function<double(double)> density;

  /// l(x) = f_Y(x) x^alpha.
  double ell(double x) const;

  static RegVaryingSpectrum carma(const CarmaModel& model);
  static RegVaryingSpectrum ficarma(const CarmaModel& model, double d);
  static RegVaryingSpectrum gamma_kernel(double nu, double lambda, double sigma2 = 1.0);
};

/// zeta(s, r) = sum_{k >= 0} (r + k)^{-s}, Euler-Maclaurin with 12 explicit terms and Bernoulli
/// corrections through B_12. Domain 1 < s <= 64, 0 < r <= 4.
double hurwitz_zeta(double s, double r);

/// |w|^{-alpha} + (2 pi)^{-alpha} [zeta(alpha, 1 - w/2pi) + zeta(alpha, 1 + w/2pi)]
///   = sum_k |w + 2 k pi|^{-alpha}, for w in [-pi, pi] \ {0}.
double aliasing_bracket(double alpha, double omega);

/// log of aliasing_bracket, evaluated without overflow for tiny |w| or large alpha.
double log_aliasing_bracket(double alpha, double omega);

/// Spectral density of Y_{n delta} by frequency folding, (1/delta) sum_k f_Y((w + 2 k pi) / delta):
/// direct sum over |k| <= terms plus the integral of the remaining tail beyond k = terms + 1/2.
double sampled_spectral_density_aliasing(const std::function<double(double)>& f_y, double delta, double omega,
                                         Eigen::Index terms = 2000);

/// l(1/delta) delta^{alpha-1} * aliasing_bracket(alpha, w).
double asymptotic_sampled_density(const RegVaryingSpectrum& spec, double delta, double omega);

/// C_alpha = exp{ (1/2pi) int_{-pi}^{pi} log aliasing_bracket(alpha, w) dw }, 1 < alpha <= 40.
double c_alpha(double alpha);

/// S_{p,alpha} = int_{-pi}^{pi} (1 - cos w)^p aliasing_bracket(alpha, w) dw, 1 < alpha < 2p + 1.
double s_p_alpha(int p, double alpha);

/// One-step prediction variance 2 pi exp{ (1/2pi) int log f } of a stationary sequence with spectral
/// density f on [-pi, pi].
double kolmogorov_sigma2(const std::function<double(double)>& f_delta, const QuadratureConfig& cfg = {1e-11, 1e-11, 4000, true});

/// 2 pi C_alpha l(1/delta) delta^{alpha-1}.
double wold_variance_asymptotics_rv(const RegVaryingSpectrum& spec, double delta);

/// sigma^2 / (2 pi) |w|^{-2d} |b(iw) / a(iw)|^2, 0 < d < 1/2, w != 0.
double ficarma_spectral_density(const CarmaModel& model, double d, double omega);

/// sigma^2 Gamma(nu)^2 / (2 pi (lambda^2 + w^2)^nu), spectrum of the gamma kernel.
double gamma_kernel_spectral_density(double nu, double lambda, double sigma2, double omega);

enum class TurbulenceKind { von_karman, kaimal };

/// Opaque parameters of the two turbulence spectra; each formula reads only its own fields.
struct TurbulenceParams {
  double c = 1.0;
  double c_ell = 1.0;
  double mean_velocity = 1.0;
  /// Integral scale divided by mean velocity.
  double scaled_length = 1.0;
  double variance = 1.0;
};

/// von Karman: C U^{-2/3} |w|^{-5/3} (w^2 / (w^2 + c_ell / lbar^2))^{17/6}, DomainError at w = 0.
/// Kaimal: v 4 lbar / (1 + 6 lbar |w|)^{5/3}.
double turbulence_spectrum(TurbulenceKind kind, const TurbulenceParams& params, double omega);

/// Negated least-squares slope of log f against log w over points with w in [lo, hi].
double tail_index_diagnostic(const Eigen::VectorXd& freqs, const Eigen::VectorXd& values, double band_lo,
                             double band_hi);

}  // namespace cmak
