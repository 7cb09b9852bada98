#include <cmath>

#include <gtest/gtest.h>

#include "cmak/carma.hpp"
#include "cmak/error.hpp"
#include "cmak/estimation.hpp"
#include "cmak/random.hpp"
#include "cmak/simulation.hpp"
#include "cmak/spectral_empirical.hpp"
#include "cmak/spectral_theory.hpp"

using namespace cmak;

namespace {

Eigen::VectorXd white_noise(Eigen::Index n, std::uint64_t seed) {
  PhiloxStream rng(seed, 0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.normal();
  return x;
}

}  // namespace

TEST(SpectralEmpirical, PeriodogramParseval) {
  const Eigen::Index n = 1000;
  const SampledSeries s = SampledSeries::create(0.1, white_noise(n, 1));
  const SpectralFunction p = periodogram(s);
  ASSERT_EQ(p.freqs.size(), n / 2);
  EXPECT_NEAR(p.freqs(0), 2.0 * M_PI / n, 1e-15);
  const double total = 2.0 * p.values.head(n / 2 - 1).sum() + p.values(n / 2 - 1);
  EXPECT_NEAR(2.0 * M_PI / n * total, sample_acvf(s, 0).gamma(0), 1e-10);
}

TEST(SpectralEmpirical, PeriodogramCosineAndConstant) {
  const Eigen::Index n = 256;
  const int k = 10;
  Eigen::VectorXd x(n);
  for (Eigen::Index t = 0; t < n; ++t) x(t) = 3.0 * std::cos(2.0 * M_PI * k * double(t) / n);
  const SpectralFunction p = periodogram(SampledSeries::create(1.0, x));
  EXPECT_NEAR(p.values(k - 1), 9.0 * n / (8.0 * M_PI), 1e-9);
  EXPECT_NEAR(p.values.sum() - p.values(k - 1), 0.0, 1e-9);
  const SpectralFunction c = periodogram(SampledSeries::create(1.0, Eigen::VectorXd::Constant(n, 2.0)));
  EXPECT_LT(c.values.maxCoeff(), 1e-20);
}

TEST(SpectralEmpirical, WelchWhiteNoiseCalibration) {
  const SampledSeries s = SampledSeries::create(1.0, white_noise(1 << 18, 2));
  const SpectralFunction w = welch(s, 1 << 12);
  EXPECT_EQ(w.method, SpectralMethod::welch);
  EXPECT_EQ(w.segments, 127);
  EXPECT_NEAR(w.values.mean() * 2.0 * M_PI, 1.0, 0.02);
  EXPECT_THROW(welch(s, (1 << 18) + 1), Error);
}

TEST(SpectralEmpirical, WelchDegeneratesToPeriodogram) {
  const SampledSeries s = SampledSeries::create(1.0, white_noise(512, 3));
  const SpectralFunction w = welch(s, 512, 0.0, Window::rectangular);
  const SpectralFunction p = periodogram(s);
  ASSERT_EQ(w.values.size(), p.values.size());
  EXPECT_LT((w.values - p.values).cwiseAbs().maxCoeff(), 1e-12 * p.values.maxCoeff());
}

TEST(SpectralEmpirical, WelchCar1AgainstExactSampledDensity) {
  const CarmaModel m = CarmaModel::create(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 1.0);
  const double d = 0.1;
  const SampledSeries s = simulate_carma_statespace(m, SimulationPlan::create(d, 1 << 18, 4, 1));
  const SpectralFunction w = welch(s, 1 << 10);
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < w.freqs.size(); ++i) {
    if (w.freqs(i) < 0.1 || w.freqs(i) > 2.0) continue;
    sum += std::pow(std::log(w.values(i) / sampled_spectral_density_exact(m, d, w.freqs(i))), 2);
    ++count;
  }
  EXPECT_GT(count, 100);
  EXPECT_LT(std::sqrt(sum / count), 0.10);
}

TEST(SpectralEmpirical, DefaultSegment) {
  EXPECT_EQ(default_welch_segment(1 << 20), 1 << 17);
  EXPECT_EQ(default_welch_segment(1000), 64);
  EXPECT_EQ(default_welch_segment(std::int64_t(1) << 30), 1 << 22);
  EXPECT_EQ(default_welch_segment(40), 8);
}

TEST(SpectralEmpirical, UnitConversions) {
  SpectralFunction f;
  f.freqs = Eigen::VectorXd::LinSpaced(4, 0.5, 2.0);
  f.values = Eigen::VectorXd::Constant(4, 3.0);
  const SpectralFunction c = f.to_continuous(0.25);
  EXPECT_EQ(c.unit, FrequencyUnit::rad_per_time);
  EXPECT_DOUBLE_EQ(c.freqs(0), 2.0);
  EXPECT_DOUBLE_EQ(c.values(0), 0.75);
  const SpectralFunction hz = c.to_hertz();
  EXPECT_EQ(hz.unit, FrequencyUnit::hertz);
  EXPECT_DOUBLE_EQ(hz.freqs(0), 2.0 / (2.0 * M_PI));
  EXPECT_DOUBLE_EQ(hz.values(0), 0.75 * 2.0 * M_PI);
}

TEST(SpectralEmpirical, SpectrumFromTabulatedGammaKernel) {
  const double nu = 5.0 / 6.0;
  const double d = 1e-3;
  KernelEstimate est;
  est.delta = d;
  est.offset_h = 0.5;
  est.g_hat.resize(40000);
  for (Eigen::Index j = 0; j < est.g_hat.size(); ++j) {
    const double t = (double(j) + 0.5) * d;
    est.g_hat(j) = std::pow(t, nu - 1.0) * std::exp(-t);
  }
  Eigen::VectorXd omegas(5);
  omegas << 0.1, 0.5, 1.0, 3.0, 10.0;
  const SpectralFunction f = spectrum_from_kernel(est, omegas);
  EXPECT_EQ(f.method, SpectralMethod::kernel_derived);
  for (Eigen::Index i = 0; i < omegas.size(); ++i)
    EXPECT_NEAR(f.values(i) / gamma_kernel_spectral_density(nu, 1.0, 1.0, omegas(i)), 1.0, 0.01) << omegas(i);

  est.g_hat.setZero();
  EXPECT_EQ(spectrum_from_kernel(est, omegas).values.maxCoeff(), 0.0);
}

TEST(SpectralEmpirical, StructureFunctionModes) {
  auto ou = [](double h) { return 0.5 * std::exp(-std::abs(h)); };
  EXPECT_EQ(structure_function(ou, 0.0), 0.0);
  EXPECT_NEAR(structure_function(ou, 0.2), 1.0 - std::exp(-0.2), 1e-15);
  Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(11, 0.0, 10.0);
  EXPECT_DOUBLE_EQ(structure_function(SampledSeries::create(1.0, ramp), 2), 4.0);
}

TEST(SpectralEmpirical, GammaStructureRegimes) {
  for (double nu : {0.8, 1.2, 2.5, 4.0}) {
    const GammaKernelModel m = GammaKernelModel::create(nu, 1.0);
    double prev = 1.0;
    for (int k = 4; k <= 10; k += 3) {
      const double delta = std::ldexp(1.0, -k);
      const double s2 = structure_function([&](double h) { return gamma_acvf(m, h); }, delta);
      const double gap = std::abs(s2 / (2.0 * m.variance()) / gamma_structure_leading_term(nu, 1.0, delta) - 1.0);
      EXPECT_LT(gap, prev) << "nu = " << nu;
      prev = gap;
    }
    EXPECT_LT(prev, 0.05) << "nu = " << nu;
  }
}
