#include "cmak/spectral_empirical.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "cmak/error.hpp"

namespace cmak {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd window_weights(Window window, Eigen::Index m) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(m);
  if (window == Window::hamming && m > 1) {
    for (Eigen::Index t = 0; t < m; ++t) w(t) = 0.54 - 0.46 * std::cos(2.0 * kPi * double(t) / double(m - 1));
  }
  return w;
}

}  // namespace

SpectralFunction SpectralFunction::to_continuous(double delta) const {
  require(unit == FrequencyUnit::rad_per_sample, ErrorCode::InvalidArgument, "spectrum is not in sampled units");
  require(delta > 0.0, ErrorCode::DomainError, "sampling interval must be positive");
  SpectralFunction out = *this;
  out.freqs /= delta;
  out.values *= delta;
  out.unit = FrequencyUnit::rad_per_time;
  return out;
}

SpectralFunction SpectralFunction::to_hertz() const {
  require(unit == FrequencyUnit::rad_per_time, ErrorCode::InvalidArgument, "convert to continuous time first");
  SpectralFunction out = *this;
  out.freqs /= 2.0 * kPi;
  out.values *= 2.0 * kPi;
  out.unit = FrequencyUnit::hertz;
  return out;
}

SpectralFunction periodogram(const SampledSeries& series) {
  const Eigen::Index n = series.n();
  require(n >= 2, ErrorCode::InvalidArgument, "periodogram needs at least two observations");
  std::vector<double> centered(n);
  const double mean = series.values.mean();
  for (Eigen::Index t = 0; t < n; ++t) centered[t] = series.values(t) - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, centered);
  const Eigen::Index bins = n / 2;
  SpectralFunction out;
  out.method = SpectralMethod::periodogram;
  out.segment_len = n;
  out.segments = 1;
  out.freqs.resize(bins);
  out.values.resize(bins);
  for (Eigen::Index k = 1; k <= bins; ++k) {
    out.freqs(k - 1) = 2.0 * kPi * double(k) / double(n);
    out.values(k - 1) = std::norm(spectrum[k]) / (2.0 * kPi * double(n));
  }
  return out;
}

Eigen::Index default_welch_segment(Eigen::Index n) {
  constexpr Eigen::Index cap = Eigen::Index(1) << 22;
  if (n >= cap) return cap;
  Eigen::Index m = 1;
  while (2 * m <= n / 8) m *= 2;
  return std::min(std::max<Eigen::Index>(m, 8), n);
}

SpectralFunction welch(const SampledSeries& series, Eigen::Index segment_len, double overlap, Window window) {
  const Eigen::Index n = series.n();
  if (segment_len < 2 || segment_len > n) {
    std::ostringstream msg;
    msg << "segment length " << segment_len << " must lie in [2, " << n << "]";
    fail(ErrorCode::SegmentTooLong, msg.str());
  }
  require(overlap >= 0.0 && overlap <= 0.95, ErrorCode::DomainError, "overlap must lie in [0, 0.95]");
  const Eigen::Index m = segment_len;
  const Eigen::Index step = std::max<Eigen::Index>(1, Eigen::Index(std::floor(double(m) * (1.0 - overlap))));
  const Eigen::VectorXd w = window_weights(window, m);
  const double power = w.squaredNorm();
  const double mean = series.values.mean();
  const Eigen::Index bins = m / 2;

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(bins);
  Eigen::FFT<double> fft;
  std::vector<double> segment(m);
  std::vector<std::complex<double>> spectrum;
  Eigen::Index count = 0;
  for (Eigen::Index start = 0; start + m <= n; start += step) {
    for (Eigen::Index t = 0; t < m; ++t) segment[t] = w(t) * (series.values(start + t) - mean);
    fft.fwd(spectrum, segment);
    for (Eigen::Index k = 1; k <= bins; ++k) acc(k - 1) += std::norm(spectrum[k]);
    ++count;
  }

  SpectralFunction out;
  out.method = SpectralMethod::welch;
  out.window = window;
  out.segment_len = m;
  out.segments = count;
  out.overlap = overlap;
  out.freqs.resize(bins);
  for (Eigen::Index k = 1; k <= bins; ++k) out.freqs(k - 1) = 2.0 * kPi * double(k) / double(m);
  out.values = acc / (2.0 * kPi * power * double(count));
  return out;
}

SpectralFunction spectrum_from_kernel(const KernelEstimate& estimate, const Eigen::VectorXd& omegas) {
  SpectralFunction out;
  out.method = SpectralMethod::kernel_derived;
  out.unit = FrequencyUnit::rad_per_time;
  out.freqs = omegas;
  out.values.resize(omegas.size());
  const Eigen::Index count = estimate.g_hat.size();
  if (count > 0) {
    const double peak = estimate.g_hat.cwiseAbs().maxCoeff();
    if (peak > 0.0 && std::abs(estimate.g_hat(count - 1)) > 1e-3 * peak) {
      out.notes.push_back("kernel table is truncated while still above 1e-3 of its peak");
    }
  }
  for (Eigen::Index i = 0; i < omegas.size(); ++i) {
    // Rotate by the per-step phase instead of calling sincos for every lag.
    const double w = omegas(i);
    const std::complex<double> rotation = std::polar(1.0, w * estimate.delta);
    std::complex<double> phase = std::polar(1.0, w * estimate.offset_h * estimate.delta);
    std::complex<double> sum = 0.0;
    for (Eigen::Index j = 0; j < count; ++j) {
      sum += estimate.g_hat(j) * phase;
      phase *= rotation;
    }
    out.values(i) = std::norm(sum * estimate.delta) / (2.0 * kPi);
  }
  return out;
}

double structure_function(const std::function<double(double)>& acvf, double delta) {
  require(delta >= 0.0, ErrorCode::DomainError, "lag must be nonnegative");
  if (delta == 0.0) return 0.0;
  return 2.0 * (acvf(0.0) - acvf(delta));
}

double structure_function(const SampledSeries& series, Eigen::Index lag) {
  require(lag >= 0 && lag < series.n(), ErrorCode::LagTooLarge, "lag must be below the series length");
  if (lag == 0) return 0.0;
  const Eigen::Index count = series.n() - lag;
  return (series.values.tail(count) - series.values.head(count)).squaredNorm() / double(count);
}

double gamma_structure_leading_term(double nu, double lambda, double delta) {
  require(nu > 0.5 && lambda > 0.0 && delta > 0.0, ErrorCode::DomainError, "need nu > 1/2, lambda > 0, delta > 0");
  const double x = lambda * delta;
  if (nu < 1.5) {
    return std::pow(2.0, 1.0 - 2.0 * nu) * std::tgamma(1.5 - nu) / std::tgamma(nu + 0.5) * std::pow(x, 2.0 * nu - 1.0);
  }
  if (nu == 1.5) return 0.5 * x * x * std::abs(std::log(x));
  return x * x / (4.0 * (nu - 1.5));
}

}  // namespace cmak
