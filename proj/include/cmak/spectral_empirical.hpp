#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmak/estimation.hpp"

namespace cmak {

enum class FrequencyUnit {
  /// Sampled-sequence frequency in [0, pi]; density of Y^delta.
  rad_per_sample,
  /// Continuous-time angular frequency; density of Y.
  rad_per_time,
  /// Cycles per unit time; density per hertz.
  hertz,
};

enum class SpectralMethod { periodogram, welch, model, kernel_derived };

enum class Window { hamming, rectangular };

struct SpectralFunction {
  Eigen::VectorXd freqs;
  Eigen::VectorXd values;
  FrequencyUnit unit = FrequencyUnit::rad_per_sample;
  SpectralMethod method = SpectralMethod::periodogram;
  Window window = Window::rectangular;
  Eigen::Index segment_len = 0;
  Eigen::Index segments = 0;
  double overlap = 0.0;
  std::vector<std::string> notes;

  /// f_Y(w / delta) ~ delta f_delta(w): sampled units to continuous time.
  SpectralFunction to_continuous(double delta) const;
  /// Angular to cycles: f(phi) = 2 pi f(2 pi phi).
  SpectralFunction to_hertz() const;
};

/// I(w_k) = |sum_t (Y_t - mean) e^{-i t w_k}|^2 / (2 pi n) at w_k = 2 pi k / n, k = 1..floor(n/2).
SpectralFunction periodogram(const SampledSeries& series);

/// Largest power of two not above n / 8, capped at 2^22; at least 8 when n allows.
Eigen::Index default_welch_segment(Eigen::Index n);

/// Average of windowed periodograms over segments of length M with step floor(M (1 - overlap)),
/// normalized by sum w_t^2, at w_k = 2 pi k / M, k = 1..M/2. The global mean is removed first.
SpectralFunction welch(const SampledSeries& series, Eigen::Index segment_len, double overlap = 0.5,
                       Window window = Window::hamming);

/// (1 / 2pi) |sum_j g_j e^{i w (j + h) delta} delta|^2 at the given angular frequencies (per unit time).
SpectralFunction spectrum_from_kernel(const KernelEstimate& estimate, const Eigen::VectorXd& omegas);

/// Model mode: S_2(delta) = 2 (gamma(0) - gamma(delta)).
double structure_function(const std::function<double(double)>& acvf, double delta);
/// Data mode: mean of (Y_{t + lag} - Y_t)^2.
double structure_function(const SampledSeries& series, Eigen::Index lag = 1);

/// Leading small-delta term of S_2(delta) / (2 gamma(0)) for the gamma kernel:
///   nu < 3/2: 2^{1-2nu} Gamma(3/2 - nu) / Gamma(nu + 1/2) (lambda delta)^{2nu-1}
///   nu = 3/2: (lambda delta)^2 |log(lambda delta)| / 2
///   nu > 3/2: (lambda delta)^2 / (4 (nu - 3/2)).
double gamma_structure_leading_term(double nu, double lambda, double delta);

}  // namespace cmak
