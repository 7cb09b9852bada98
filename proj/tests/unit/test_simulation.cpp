#include <cmath>

#include <gtest/gtest.h>

#include "cmak/carma.hpp"
#include "cmak/error.hpp"
#include "cmak/estimation.hpp"
#include "cmak/quadrature.hpp"
#include "cmak/random.hpp"
#include "cmak/simulation.hpp"

using namespace cmak;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Bartlett standard error of the sample autocovariance at lag h.
double acvf_se(const std::function<double(double)>& gamma, double delta, int h, Eigen::Index n) {
  double s = 0.0;
  for (int k = -400; k <= 400; ++k) {
    const double a = gamma(k * delta);
    s += a * a + gamma((k + h) * delta) * gamma((k - h) * delta);
  }
  return std::sqrt(s / double(n));
}

void expect_acvf_matches(const SampledSeries& s, const std::function<double(double)>& gamma) {
  const AcvfSequence a = sample_acvf(s, 5);
  for (int h : {0, 1, 5}) {
    const double se = acvf_se(gamma, s.delta, h, s.n());
    EXPECT_NEAR(a.gamma(h), gamma(h * s.delta), 3.0 * se) << "lag " << h;
  }
}

}  // namespace

TEST(Random, PhiloxKnownAnswer) {
  PhiloxStream rng(0, 0);
  EXPECT_EQ(rng(), 0x6627e8d5u);
  EXPECT_EQ(rng(), 0xe169c58du);
  EXPECT_EQ(rng(), 0xbc57ac4cu);
  EXPECT_EQ(rng(), 0x9b00dbd8u);
}

TEST(Random, StreamsAreDistinctAndReproducible) {
  PhiloxStream a(7, 1), b(7, 1), c(7, 2);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(Random, NormalAndPoissonMoments) {
  PhiloxStream rng(11, 0);
  const int n = 200000;
  double s = 0.0, s2 = 0.0, p = 0.0, p2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
    const double k = double(rng.poisson(37.5));
    p += k;
    p2 += k * k;
  }
  EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(double(n)));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(p / n, 37.5, 4.0 * std::sqrt(37.5 / n));
  EXPECT_NEAR(p2 / n - (p / n) * (p / n), 37.5, 0.5);
}

TEST(Simulation, BesselClosedForms) {
  EXPECT_NEAR(bessel_k(0.5, 1.0), std::sqrt(M_PI / 2.0) * std::exp(-1.0), 1e-10 * 0.46);
  EXPECT_NEAR(bessel_k(1.5, 1.0), std::sqrt(M_PI / 2.0) * std::exp(-1.0) * 2.0, 1e-10);
  EXPECT_NEAR(bessel_k(2.5, 3.0) / (std::sqrt(M_PI / 6.0) * std::exp(-3.0) * (1.0 + 1.0 + 1.0 / 3.0)), 1.0, 1e-10);
  EXPECT_DOUBLE_EQ(bessel_k(1.3, 0.7), bessel_k(-1.3, 0.7));
  EXPECT_NEAR(bessel_k_scaled(0.5, 500.0), std::sqrt(M_PI / 1000.0), 1e-12);
}

TEST(Simulation, GammaAcvf) {
  const GammaKernelModel g2 = GammaKernelModel::create(2.0, 1.0);
  EXPECT_NEAR(g2.variance(), 0.25, 1e-15);
  EXPECT_NEAR(gamma_acvf(g2, 0.0), 0.25, 1e-15);
  EXPECT_EQ(gamma_acvf(g2, 0.3), gamma_acvf(g2, -0.3));
  for (double nu : {1.05, 2.0, 0.8}) {
    const GammaKernelModel m = GammaKernelModel::create(nu, 1.0);
    const CmaKernel k = m.kernel();
    for (double h : {0.5, 1.0, 3.0}) {
      QuadratureConfig cfg;
      const double conv = integrate_to_infinity([&](double u) { return k(u) * k(u + h); }, 0.0, cfg).value;
      EXPECT_NEAR(gamma_acvf(m, h), conv, 1e-8) << "nu = " << nu << " h = " << h;
    }
  }
  EXPECT_THROW(GammaKernelModel::create(0.5, 1.0), Error);
}

TEST(Simulation, PlanValidation) {
  const SimulationPlan p = SimulationPlan::create(0.5, 100, 1, 8);
  EXPECT_EQ(p.refinement(), 8);
  EXPECT_DOUBLE_EQ(p.fine_delta, 0.0625);
  EXPECT_THROW(SimulationPlan::create(0.5, 100, 1, 0), Error);
  EXPECT_THROW(SimulationPlan::create(-1.0, 100, 1, 4), Error);
}

TEST(Simulation, CirculantOuMatchesAcvf) {
  const double d = 0.1;
  auto gamma = [](double h) { return 0.5 * std::exp(-std::abs(h)); };
  SimulationDiagnostics diag;
  const SampledSeries s = simulate_gaussian_cma(gamma, SimulationPlan::create(d, 1 << 16, 42, 1), &diag);
  EXPECT_EQ(s.n(), 1 << 16);
  EXPECT_GE(diag.embedding_size, 2 * ((1 << 16) - 1));
  expect_acvf_matches(s, gamma);
  const SampledSeries again = simulate_gaussian_cma(gamma, SimulationPlan::create(d, 1 << 16, 42, 1));
  EXPECT_EQ((s.values - again.values).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simulation, CirculantZeroAcvf) {
  const SampledSeries s = simulate_gaussian_cma([](double) { return 0.0; }, SimulationPlan::create(1.0, 64, 3, 2));
  EXPECT_EQ(s.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simulation, CirculantGammaKernel) {
  const GammaKernelModel m = GammaKernelModel::create(2.0, 1.0);
  auto gamma = [&](double h) { return gamma_acvf(m, h); };
  const SampledSeries s = simulate_gaussian_cma(gamma, SimulationPlan::create(0.25, 1 << 16, 5, 4));
  expect_acvf_matches(s, gamma);
}

TEST(Simulation, StateSpaceLyapunovAndNoise) {
  const CarmaModel m = CarmaModel::create(vec({3.0, 2.0}), vec({0.5, 1.0}), 1.0);
  const CarmaStateSpace ss = CarmaStateSpace::from_model(m);
  const Eigen::MatrixXd s = ss.stationary_cov;
  EXPECT_LT((ss.a * s + s * ss.a.transpose() + ss.e * ss.e.transpose()).norm(), 1e-13);
  EXPECT_NEAR(ss.b.dot(s * ss.b), carma_autocovariance(m, 0.0), 1e-13);
  const double d = 0.3;
  const Eigen::MatrixXd f = ss.transition(d);
  // Stationarity: S = F S F^T + Q.
  EXPECT_LT((f * s * f.transpose() + ss.noise_cov(d) - s).norm(), 1e-12);
  EXPECT_NEAR(ss.b.dot(f * s * ss.b), carma_autocovariance(m, d), 1e-13);
}

TEST(Simulation, StateSpaceCarma10IsAr1) {
  const CarmaModel m = CarmaModel::create(vec({1.0}), vec({1.0}), 1.0);
  const double d = 0.25;
  const SampledSeries s = simulate_carma_statespace(m, SimulationPlan::create(d, 1 << 16, 8, 1));
  // Residuals of the AR(1) recursion carry variance (1 - e^{-2 delta}) / 2 and no lag-one correlation.
  const double phi = std::exp(-d);
  Eigen::VectorXd z = s.values.tail(s.n() - 1) - phi * s.values.head(s.n() - 1);
  const double var = z.squaredNorm() / double(z.size());
  const double expected = (1.0 - std::exp(-2.0 * d)) / 2.0;
  EXPECT_NEAR(var / expected, 1.0, 4.0 * std::sqrt(2.0 / double(z.size())));
  const double lag1 = z.head(z.size() - 1).dot(z.tail(z.size() - 1)) / double(z.size()) / expected;
  EXPECT_LT(std::abs(lag1), 4.0 / std::sqrt(double(z.size())));
}

TEST(Simulation, StateSpaceCarma21Variance) {
  const CarmaModel m = CarmaModel::create(vec({3.0, 2.0}), vec({0.5, 1.0}), 1.0);
  auto gamma = [&](double h) { return carma_autocovariance(m, h); };
  const SampledSeries s = simulate_carma_statespace(m, SimulationPlan::create(0.2, 1 << 17, 13, 1));
  expect_acvf_matches(s, gamma);
}

TEST(Simulation, CompoundPoissonSecondOrder) {
  const CarmaModel m = CarmaModel::create(vec({1.0}), vec({1.0}), 1.0);
  auto gamma = [&](double h) { return carma_autocovariance(m, h); };
  const SampledSeries s = simulate_carma_statespace(
      m, SimulationPlan::create(0.25, 1 << 15, 21, 16, {DriverKind::compound_poisson, 20.0}));
  expect_acvf_matches(s, gamma);
  EXPECT_THROW(simulate_carma_statespace(
                   m, SimulationPlan::create(0.25, 100, 21, 8, {DriverKind::compound_poisson, 20.0})),
               Error);
}

TEST(Simulation, EulerRefinementConverges) {
  // Matched increments: the exact recursion X_{n+1} = e^{-d} X_n + int e^{-(d-u)} dW aggregates fine
  // Brownian increments; the Euler scheme uses the same increments.
  const CarmaModel m = CarmaModel::create(vec({1.0}), vec({1.0}), 1.0);
  const CarmaStateSpace ss = CarmaStateSpace::from_model(m);
  const double out = 0.5;
  const Eigen::Index n_out = 400;
  const int finest = 256;
  PhiloxStream rng(99, 0);
  const double h = out / finest;
  Eigen::VectorXd dw(n_out * finest);
  for (Eigen::Index i = 0; i < dw.size(); ++i) dw(i) = std::sqrt(h) * rng.normal();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd reference = carma_euler_path(ss, h, dw, finest, x0);
  std::vector<double> rms;
  for (int r : {4, 8, 16}) {
    const int agg = finest / r;
    Eigen::VectorXd coarse(n_out * r);
    for (Eigen::Index i = 0; i < coarse.size(); ++i) coarse(i) = dw.segment(i * agg, agg).sum();
    const Eigen::VectorXd path = carma_euler_path(ss, out / r, coarse, r, x0);
    rms.push_back(std::sqrt((path - reference).squaredNorm() / double(path.size())));
  }
  EXPECT_GT(rms[0] / rms[1], std::sqrt(2.0) * 0.9);
  EXPECT_GT(rms[1] / rms[2], std::sqrt(2.0) * 0.9);
}

TEST(Simulation, Determinism) {
  const CarmaModel m = CarmaModel::create(vec({3.0, 2.0}), vec({0.5, 1.0}), 1.0);
  const SimulationPlan p = SimulationPlan::create(0.1, 1000, 77, 1);
  EXPECT_EQ((simulate_carma_statespace(m, p).values - simulate_carma_statespace(m, p).values).norm(), 0.0);
  SimulationPlan q = p;
  q.stream = 1;
  EXPECT_GT((simulate_carma_statespace(m, p).values - simulate_carma_statespace(m, q).values).norm(), 0.0);
}
