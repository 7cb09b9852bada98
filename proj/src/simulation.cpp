#include "cmak/simulation.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "cmak/error.hpp"
#include "cmak/quadrature.hpp"
#include "cmak/random.hpp"

namespace cmak {

namespace {

constexpr double kClipTolerance = 1e-8;
constexpr int kEmbeddingDoublings = 2;

Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p *= 2;
  return p;
}

// Symmetric square root factor of a positive semidefinite matrix.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace

GammaKernelModel GammaKernelModel::create(double nu, double lambda, double sigma2) {
  require(nu > 0.5 && lambda > 0.0 && sigma2 > 0.0, ErrorCode::DomainError,
          "gamma kernel needs nu > 1/2, lambda > 0, sigma2 > 0");
  return GammaKernelModel{nu, lambda, sigma2};
}

double GammaKernelModel::variance() const {
  return sigma2 * std::pow(2.0 * lambda, 1.0 - 2.0 * nu) * std::tgamma(2.0 * nu - 1.0);
}

double bessel_k_scaled(double nu, double x) {
  require(x > 0.0 && std::isfinite(x), ErrorCode::DomainError, "Bessel K needs x > 0");
  require(std::abs(nu) <= 20.0, ErrorCode::DomainError, "Bessel K order limited to |nu| <= 20");
  const double a = std::abs(nu);
  // e^x K = int_0^inf exp(-x (cosh t - 1) + a t) (1 + e^{-2at}) / 2 dt; cut where the exponent
  // has dropped by 50 past its maximum.
  auto log_integrand = [x, a](double t) { return -x * (std::cosh(t) - 1.0) + a * t; };
  const double peak_t = std::asinh(a / x);
  const double peak = log_integrand(peak_t);
  double upper = peak_t + 1.0;
  while (log_integrand(upper) > peak - 50.0) upper *= 1.5;
  auto f = [&](double t) {
    return 0.5 * (std::exp(log_integrand(t)) + std::exp(-x * (std::cosh(t) - 1.0) - a * t));
  };
  double step = upper / 8.0;
  double sum = 0.5 * (f(0.0) + f(upper));
  for (int i = 1; i < 8; ++i) sum += f(i * step);
  double estimate = sum * step;
  for (int level = 0; level < 24; ++level) {
    double added = 0.0;
    for (double t = 0.5 * step; t < upper; t += step) added += f(t);
    sum += added;
    step *= 0.5;
    const double refined = sum * step;
    if (std::abs(refined - estimate) <= 1e-13 * std::abs(refined) && level >= 2) return refined;
    estimate = refined;
  }
  std::ostringstream msg;
  msg << "Bessel K_" << nu << "(" << x << ") did not converge";
  fail(ErrorCode::BesselFailure, msg.str());
}

double bessel_k(double nu, double x) { return std::exp(-x) * bessel_k_scaled(nu, x); }

double gamma_acvf(const GammaKernelModel& model, double h) {
  const double var = model.variance();
  const double x = model.lambda * std::abs(h);
  if (x == 0.0) return var;
  if (x > 800.0) return 0.0;
  const double order = model.nu - 0.5;
  const double log_rho = (1.5 - model.nu) * std::log(2.0) - std::lgamma(order) + order * std::log(x) - x +
                         std::log(bessel_k_scaled(order, x));
  return var * std::exp(log_rho);
}

SimulationPlan SimulationPlan::create(double out_delta, Eigen::Index n_out, std::uint64_t seed, int refinement,
                                      Driver driver) {
  require(out_delta > 0.0 && refinement >= 1 && n_out >= 2, ErrorCode::InvalidArgument,
          "plan needs out_delta > 0, refinement >= 1, n_out >= 2");
  SimulationPlan plan;
  plan.out_delta = out_delta;
  plan.fine_delta = out_delta / refinement;
  plan.n_out = n_out;
  plan.seed = seed;
  plan.driver = driver;
  return plan;
}

Eigen::Index SimulationPlan::refinement() const {
  require(fine_delta > 0.0 && out_delta > 0.0, ErrorCode::InvalidArgument, "grid spacings must be positive");
  const double ratio = out_delta / fine_delta;
  const double rounded = std::round(ratio);
  require(rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * ratio, ErrorCode::InvalidArgument,
          "out_delta must be an integer multiple of fine_delta");
  return Eigen::Index(rounded);
}

SampledSeries simulate_gaussian_cma(const std::function<double(double)>& acvf, const SimulationPlan& plan,
                                    SimulationDiagnostics* diagnostics) {
  require(plan.n_out >= 2, ErrorCode::InvalidArgument, "need at least two output points");
  const Eigen::Index refine = plan.refinement();
  const Eigen::Index fine_points = (plan.n_out - 1) * refine + 1;
  SimulationDiagnostics diag;

  Eigen::Index size = next_pow2(std::max<Eigen::Index>(2 * (fine_points - 1), 2));
  std::vector<double> eigenvalues;
  Eigen::FFT<double> fft;
  for (int attempt = 0;; ++attempt) {
    std::vector<double> row(size);
    const Eigen::Index half = size / 2;
    for (Eigen::Index k = 0; k <= half; ++k) row[k] = acvf(double(k) * plan.fine_delta);
    for (Eigen::Index k = half + 1; k < size; ++k) row[k] = row[size - k];
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, row);
    eigenvalues.resize(size);
    double largest = 0.0;
    double most_negative = 0.0;
    for (Eigen::Index k = 0; k < size; ++k) {
      eigenvalues[k] = spectrum[k].real();
      largest = std::max(largest, eigenvalues[k]);
      most_negative = std::min(most_negative, eigenvalues[k]);
    }
    if (most_negative >= -kClipTolerance * largest) {
      double clipped = 0.0;
      for (double& ev : eigenvalues) {
        if (ev < 0.0) {
          clipped -= ev;
          ev = 0.0;
        }
      }
      if (largest > 0.0 && clipped > 0.0) {
        diag.clipped_fraction = clipped / largest;
        std::ostringstream msg;
        msg << "clipped negative circulant eigenvalues (total " << diag.clipped_fraction << " of the largest)";
        diag.warnings.push_back(msg.str());
      }
      break;
    }
    if (attempt == kEmbeddingDoublings) {
      std::ostringstream msg;
      msg << "circulant embedding of size " << size << " has eigenvalue " << most_negative << " against largest "
          << largest;
      fail(ErrorCode::EmbeddingFailure, msg.str());
    }
    size *= 2;
  }
  diag.embedding_size = size;

  PhiloxStream rng(plan.seed, plan.stream);
  std::vector<std::complex<double>> weighted(size);
  for (Eigen::Index k = 0; k < size; ++k) {
    const double scale = std::sqrt(eigenvalues[k] / double(size));
    const double re = rng.normal();
    const double im = rng.normal();
    weighted[k] = {scale * re, scale * im};
  }
  // Eigen's inverse transform divides by the size; undo that to get the unnormalized DFT.
  std::vector<std::complex<double>> field;
  fft.inv(field, weighted);
  Eigen::VectorXd out(plan.n_out);
  for (Eigen::Index i = 0; i < plan.n_out; ++i) out(i) = field[i * refine].real() * double(size);
  if (diagnostics) *diagnostics = std::move(diag);
  return SampledSeries::create(plan.out_delta, std::move(out));
}

CarmaStateSpace CarmaStateSpace::from_model(const CarmaModel& model) {
  const int p = model.p();
  CarmaStateSpace ss;
  ss.a = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i + 1 < p; ++i) ss.a(i, i + 1) = 1.0;
  for (int j = 0; j < p; ++j) ss.a(p - 1, j) = -model.ar()(p - 1 - j);
  ss.e = Eigen::VectorXd::Zero(p);
  ss.e(p - 1) = 1.0;
  ss.b = Eigen::VectorXd::Zero(p);
  ss.b.head(model.q() + 1) = model.ma();

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(p * p, p * p);
  // vec(A S + S A^T) = (I (x) A + A (x) I) vec(S), column-major vec.
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      kron.block(i * p, j * p, p, p) += identity(i, j) * ss.a;
      kron.block(i * p, j * p, p, p) += ss.a(i, j) * identity;
    }
  }
  const Eigen::MatrixXd rhs = -ss.e * ss.e.transpose();
  const Eigen::VectorXd vec = kron.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), p * p));
  ss.stationary_cov = Eigen::Map<const Eigen::MatrixXd>(vec.data(), p, p);
  ss.stationary_cov = 0.5 * (ss.stationary_cov + ss.stationary_cov.transpose()).eval();
  const double residual = (ss.a * ss.stationary_cov + ss.stationary_cov * ss.a.transpose() - rhs).norm();
  Eigen::LLT<Eigen::MatrixXd> llt(ss.stationary_cov);
  if (!vec.allFinite() || residual > 1e-8 || llt.info() != Eigen::Success) {
    fail(ErrorCode::NonStationaryInit, "stationary state covariance is not positive definite");
  }
  return ss;
}

Eigen::MatrixXd CarmaStateSpace::transition(double delta) const { return (a * delta).exp(); }

Eigen::MatrixXd CarmaStateSpace::noise_cov(double delta) const {
  const Eigen::Index p = a.rows();
  // Split so each panel spans at most unit norm of A u.
  const int panels = std::max(1, int(std::ceil(a.norm() * delta)));
  const double width = delta / panels;
  const GaussLegendreRule rule = gauss_legendre(24);
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(p, p);
  for (int panel = 0; panel < panels; ++panel) {
    const double left = panel * width;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      const double u = left + 0.5 * width * (rule.nodes(i) + 1.0);
      const Eigen::VectorXd v = (a * u).exp() * e;
      total += 0.5 * width * rule.weights(i) * v * v.transpose();
    }
  }
  return total;
}

Eigen::VectorXd carma_euler_path(const CarmaStateSpace& ss, double fine_delta, const Eigen::VectorXd& increments,
                                 Eigen::Index refinement, const Eigen::VectorXd& x0) {
  require(refinement >= 1 && increments.size() % refinement == 0, ErrorCode::InvalidArgument,
          "increments must fill whole output steps");
  const Eigen::MatrixXd step = ss.transition(fine_delta);
  const Eigen::VectorXd push = ss.transition(0.5 * fine_delta) * ss.e;
  const Eigen::Index n_out = increments.size() / refinement + 1;
  Eigen::VectorXd out(n_out);
  Eigen::VectorXd x = x0;
  out(0) = ss.b.dot(x);
  for (Eigen::Index k = 0; k < increments.size(); ++k) {
    x = step * x + push * increments(k);
    if ((k + 1) % refinement == 0) out((k + 1) / refinement) = ss.b.dot(x);
  }
  return out;
}

SampledSeries simulate_carma_statespace(const CarmaModel& model, const SimulationPlan& plan) {
  require(plan.n_out >= 2, ErrorCode::InvalidArgument, "need at least two output points");
  const CarmaStateSpace ss = CarmaStateSpace::from_model(model);
  const double sigma = std::sqrt(model.sigma2());
  PhiloxStream rng(plan.seed, plan.stream);
  const Eigen::Index p = model.p();

  const Eigen::MatrixXd init = psd_factor(model.sigma2() * ss.stationary_cov);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < p; ++i) z(i) = rng.normal();
  Eigen::VectorXd x = init * z;

  Eigen::VectorXd out(plan.n_out);
  if (plan.driver.kind == DriverKind::gaussian) {
    const Eigen::MatrixXd step = ss.transition(plan.out_delta);
    const Eigen::MatrixXd noise = psd_factor(model.sigma2() * ss.noise_cov(plan.out_delta));
    out(0) = ss.b.dot(x);
    for (Eigen::Index n = 1; n < plan.n_out; ++n) {
      for (Eigen::Index i = 0; i < p; ++i) z(i) = rng.normal();
      x = step * x + noise * z;
      out(n) = ss.b.dot(x);
    }
    return SampledSeries::create(plan.out_delta, std::move(out));
  }

  const Eigen::Index refine = plan.refinement();
  require(refine >= 16, ErrorCode::InvalidArgument, "compound Poisson driver needs refinement >= 16");
  require(plan.driver.rate > 0.0, ErrorCode::InvalidArgument, "compound Poisson rate must be positive");
  const double mean_jumps = plan.driver.rate * plan.fine_delta;
  const Eigen::MatrixXd step = ss.transition(plan.fine_delta);
  const Eigen::VectorXd push = ss.transition(0.5 * plan.fine_delta) * ss.e;
  out(0) = ss.b.dot(x);
  for (Eigen::Index n = 1; n < plan.n_out; ++n) {
    for (Eigen::Index k = 0; k < refine; ++k) {
      const double jumps = double(rng.poisson(mean_jumps));
      const double increment = jumps > 0.0 ? sigma * std::sqrt(jumps / plan.driver.rate) * rng.normal() : 0.0;
      x = step * x + push * increment;
    }
    out(n) = ss.b.dot(x);
  }
  return SampledSeries::create(plan.out_delta, std::move(out));
}

}  // namespace cmak
