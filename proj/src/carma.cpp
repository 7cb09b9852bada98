#include "cmak/carma.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "cmak/error.hpp"
#include "cmak/quadrature.hpp"

namespace cmak {

namespace {

constexpr double kPi = std::numbers::pi;

// Coincident roots are grouped at a looser radius than kRootSeparationTol because the companion
// eigenvalues of an exact double root already split by ~sqrt(eps).
constexpr double kClusterRadius = 1e-6;

bool conjugate_closed(const Eigen::VectorXcd& roots) {
  std::vector<bool> used(roots.size(), false);
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const Complex target = std::conj(roots(i));
    const double tol = 1e-8 * (1.0 + std::abs(roots(i)));
    if (std::abs(roots(i).imag()) <= tol) {
      used[i] = true;
      continue;
    }
    bool found = false;
    for (Eigen::Index j = 0; j < roots.size(); ++j) {
      if (j == i || used[j]) continue;
      if (std::abs(roots(j) - target) <= tol) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// Replace each cluster of nearly coincident roots by distinct roots spread around its centre.
Eigen::VectorXcd spread_clusters(const Eigen::VectorXcd& roots, bool& changed) {
  const Eigen::Index n = roots.size();
  std::vector<int> cluster(n, -1);
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = count;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (cluster[j] < 0 && std::abs(roots(i) - roots(j)) < kClusterRadius) cluster[j] = count;
    }
    ++count;
  }
  changed = false;
  std::vector<Complex> out;
  for (int c = 0; c < count; ++c) {
    std::vector<Complex> members;
    for (Eigen::Index i = 0; i < n; ++i)
      if (cluster[i] == c) members.push_back(roots(i));
    if (members.size() == 1) {
      out.push_back(members.front());
      continue;
    }
    changed = true;
    Complex centre{0.0, 0.0};
    for (const auto& m : members) centre += m;
    centre /= double(members.size());
    const int m = static_cast<int>(members.size());
    if (std::abs(centre.imag()) < kClusterRadius) {
      const double re = centre.real();
      if (m % 2 == 1) out.emplace_back(re, 0.0);
      for (int k = 1; k <= m / 2; ++k) {
        out.emplace_back(re, k * kRootPerturbation);
        out.emplace_back(re, -k * kRootPerturbation);
      }
    } else {
      // The conjugate cluster receives the mirrored spread, so only offsets along the real axis
      // are needed to stay closed under conjugation.
      for (int k = 0; k < m; ++k) out.push_back(centre + Complex((k - 0.5 * (m - 1)) * kRootPerturbation, 0.0));
    }
  }
  Eigen::VectorXcd result = Eigen::Map<Eigen::VectorXcd>(out.data(), Eigen::Index(out.size()));
  sort_roots(result);
  return result;
}

Eigen::VectorXd real_coefficients(const Eigen::VectorXcd& c) { return checked_real(c, 1e-9); }

}  // namespace

ComplexRootSet::ComplexRootSet(Eigen::VectorXcd values) : roots(std::move(values)) {
  sort_roots(roots);
  require(conjugate_closed(roots), ErrorCode::InvalidArgument, "root set is not closed under conjugation");
}

double ComplexRootSet::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < roots.size(); ++i)
    for (Eigen::Index j = i + 1; j < roots.size(); ++j) best = std::min(best, std::abs(roots(i) - roots(j)));
  return best;
}

CarmaModel CarmaModel::create(const Eigen::VectorXd& ar, const Eigen::VectorXd& ma, double sigma2,
                              CarmaOptions options) {
  require(ar.size() >= 1, ErrorCode::InvalidArgument, "CARMA order p must be positive");
  require(ma.size() >= 1, ErrorCode::InvalidArgument, "moving-average coefficients b_0..b_q required");
  require(ma.size() - 1 < ar.size(), ErrorCode::InvalidArgument, "CARMA requires q < p");
  require(std::abs(ma(ma.size() - 1) - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "normalization b_q = 1 violated");
  require(sigma2 > 0.0 && std::isfinite(sigma2), ErrorCode::InvalidArgument, "sigma2 must be positive");
  require(ar.allFinite() && ma.allFinite(), ErrorCode::InvalidArgument, "non-finite CARMA coefficient");

  const Eigen::Index p = ar.size();
  Eigen::VectorXd a_asc(p + 1);
  for (Eigen::Index k = 0; k < p; ++k) a_asc(k) = ar(p - 1 - k);
  a_asc(p) = 1.0;

  CarmaModel model;
  model.ar_ = ar;
  model.ma_ = ma;
  model.ma_(ma.size() - 1) = 1.0;
  model.sigma2_ = sigma2;
  model.ar_roots_ = ComplexRootSet(poly_roots(a_asc));
  model.ma_roots_ = ComplexRootSet(ma.size() > 1 ? poly_roots(Eigen::VectorXd(model.ma_)) : Eigen::VectorXcd(0));

  if (options.perturb_multiple_roots) {
    bool changed = false;
    Eigen::VectorXcd spread = spread_clusters(model.ar_roots_.roots, changed);
    if (changed) {
      model.ar_roots_ = ComplexRootSet(spread);
      const Eigen::VectorXd asc = real_coefficients(poly_from_roots(spread));
      for (Eigen::Index k = 0; k < p; ++k) model.ar_(k) = asc(p - 1 - k);
      model.perturbed_ = true;
    }
  }
  model.finalize();
  return model;
}

CarmaModel CarmaModel::from_roots(const Eigen::VectorXcd& ar_roots, const Eigen::VectorXcd& ma_roots, double sigma2,
                                  CarmaOptions options) {
  const Eigen::VectorXd a_asc = real_coefficients(poly_from_roots(ar_roots));
  const Eigen::VectorXd b_asc = real_coefficients(poly_from_roots(ma_roots));
  const Eigen::Index p = ar_roots.size();
  Eigen::VectorXd ar(p);
  for (Eigen::Index k = 0; k < p; ++k) ar(k) = a_asc(p - 1 - k);
  CarmaModel model = create(ar, b_asc, sigma2, options);
  // Keep the caller's roots rather than the re-extracted ones.
  if (!model.perturbed_) {
    model.ar_roots_ = ComplexRootSet(ar_roots);
    model.ma_roots_ = ComplexRootSet(ma_roots);
    model.finalize();
  }
  return model;
}

void CarmaModel::finalize() {
  for (Eigen::Index i = 0; i < ar_roots_.size(); ++i) {
    require(ar_roots_[i].real() < 0.0, ErrorCode::NonCausalModel, "autoregressive zero not in open left half-plane");
  }
  for (Eigen::Index i = 0; i < ma_roots_.size(); ++i) {
    require(ma_roots_[i].real() < 0.0, ErrorCode::NonCausalModel, "moving-average zero not in open left half-plane");
  }
  if (ar_roots_.min_separation() < kRootSeparationTol) {
    fail(ErrorCode::NearMultipleRoots, "autoregressive zeros closer than 1e-9; enable perturb_multiple_roots");
  }
  for (Eigen::Index i = 0; i < ar_roots_.size(); ++i)
    for (Eigen::Index k = 0; k < ma_roots_.size(); ++k)
      require(std::abs(ar_roots_[i] - ma_roots_[k]) > kRootSeparationTol, ErrorCode::CommonRoots,
              "a(z) and b(z) share a zero");

  weights_.resize(ar_roots_.size());
  for (Eigen::Index r = 0; r < ar_roots_.size(); ++r) weights_(r) = b(ar_roots_[r]) / a_prime_at_root(r);
}

Complex CarmaModel::a(Complex z) const {
  Complex acc{1.0, 0.0};
  for (Eigen::Index k = 0; k < ar_.size(); ++k) acc = acc * z + ar_(k);
  return acc;
}

Complex CarmaModel::b(Complex z) const { return polyval(ma_, z); }

Complex CarmaModel::a_prime_at_root(Eigen::Index r) const {
  Complex prod{1.0, 0.0};
  for (Eigen::Index m = 0; m < ar_roots_.size(); ++m)
    if (m != r) prod *= ar_roots_[r] - ar_roots_[m];
  return prod;
}

std::string CarmaModel::describe() const {
  std::ostringstream out;
  out << "CARMA(" << p() << "," << q() << ") a=[";
  for (Eigen::Index k = 0; k < ar_.size(); ++k) out << (k ? "," : "") << ar_(k);
  out << "] b=[";
  for (Eigen::Index k = 0; k < ma_.size(); ++k) out << (k ? "," : "") << ma_(k);
  out << "] sigma2=" << sigma2_;
  return out.str();
}

double carma_kernel(const CarmaModel& model, double t) {
  if (t <= 0.0) return 0.0;
  require(model.ar_roots().min_separation() >= kRootSeparationTol, ErrorCode::NearMultipleRoots,
          "kernel residue formula is ill-conditioned");
  Complex acc{0.0, 0.0};
  const auto& w = model.kernel_weights();
  for (Eigen::Index r = 0; r < w.size(); ++r) acc += w(r) * std::exp(model.ar_roots()[r] * t);
  return checked_real(acc, kRealnessTol);
}

double carma_spectral_density(const CarmaModel& model, double omega) {
  const Complex iw{0.0, omega};
  return model.sigma2() * std::norm(model.b(iw)) / (2.0 * kPi * std::norm(model.a(iw)));
}

double carma_autocovariance(const CarmaModel& model, double h) {
  require(model.ar_roots().min_separation() >= kRootSeparationTol, ErrorCode::NearMultipleRoots,
          "autocovariance residue formula is ill-conditioned");
  const double lag = std::abs(h);
  const auto& w = model.kernel_weights();
  const auto& lam = model.ar_roots().roots;
  Complex acc{0.0, 0.0};
  for (Eigen::Index r = 0; r < w.size(); ++r) {
    Complex inner{0.0, 0.0};
    for (Eigen::Index s = 0; s < w.size(); ++s) inner += w(s) / (-lam(r) - lam(s));
    acc += w(r) * inner * std::exp(lam(r) * lag);
  }
  return model.sigma2() * checked_real(acc, kRealnessTol);
}

Eigen::VectorXd carma_autocovariance_grid(const CarmaModel& model, double delta, Eigen::Index count) {
  Eigen::VectorXd out(count);
  for (Eigen::Index k = 0; k < count; ++k) out(k) = carma_autocovariance(model, double(k) * delta);
  return out;
}

double sampled_spectral_density_exact(const CarmaModel& model, double delta, double omega) {
  require(delta > 0.0, ErrorCode::DomainError, "sampling interval must be positive");
  require(std::abs(omega) <= kPi * (1.0 + 1e-12), ErrorCode::DomainError, "frequency outside [-pi, pi]");
  require(model.ar_roots().min_separation() >= kRootSeparationTol, ErrorCode::NearMultipleRoots,
          "sampled spectral residues are ill-conditioned");
  const auto& lam = model.ar_roots().roots;
  const double s = std::sin(0.5 * omega);
  Complex acc{0.0, 0.0};
  for (Eigen::Index r = 0; r < lam.size(); ++r) {
    const Complex z = lam(r);
    const Complex rational = model.b(z) * model.b(-z) / (model.a_prime_at_root(r) * model.a(-z));
    // cosh(x) - cos(w) = 2 sinh^2(x/2) + 2 sin^2(w/2), free of cancellation for small x and w.
    const Complex sh = std::sinh(0.5 * delta * z);
    const Complex denom = 2.0 * sh * sh + 2.0 * s * s;
    acc += rational * std::sinh(delta * z) / denom;
  }
  const double value = -model.sigma2() / (2.0 * kPi) * checked_real(acc, 1e-8);
  return value;
}

Eigen::VectorXd sampled_ar_polynomial(const CarmaModel& model, double delta) {
  require(delta > 0.0, ErrorCode::DomainError, "sampling interval must be positive");
  const Eigen::VectorXcd w = (model.ar_roots().roots * delta).array().exp();
  const Eigen::VectorXcd c = poly_from_reciprocal_factors(w);
  const Eigen::VectorXd real = checked_real(c, 1e-12);
  return real.tail(real.size() - 1);
}

CmaKernel CmaKernel::carma(const CarmaModel& model) {
  return CmaKernel(KernelKind::carma, [model](double t) { return carma_kernel(model, t); });
}

CmaKernel CmaKernel::gamma(double nu, double lambda) {
  require(nu > 0.5, ErrorCode::InvalidArgument, "gamma kernel needs nu > 1/2");
  require(lambda > 0.0, ErrorCode::InvalidArgument, "gamma kernel needs lambda > 0");
  return CmaKernel(KernelKind::gamma, [nu, lambda](double t) { return std::pow(t, nu - 1.0) * std::exp(-lambda * t); });
}

CmaKernel CmaKernel::table(double delta, Eigen::VectorXd values) {
  require(delta > 0.0, ErrorCode::InvalidArgument, "table spacing must be positive");
  return CmaKernel(KernelKind::custom_table, [delta, values = std::move(values)](double t) {
    const double cell = std::floor(t / delta);
    if (cell >= double(values.size())) return 0.0;
    return values(Eigen::Index(cell));
  });
}

double CmaKernel::squared_norm() const {
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-9;
  cfg.abs_tol = 1e-14;
  cfg.throw_on_failure = false;
  // t = s^2 on [0, 1] tames integrable power singularities at the origin.
  const double head = integrate([this](double s) {
                        const double g = (*this)(s * s);
                        return 2.0 * s * g * g;
                      },
                      0.0, 1.0, cfg)
                          .value;
  const double tail = integrate_to_infinity([this](double t) {
                        const double g = (*this)(t);
                        return g * g;
                      },
                      1.0, cfg)
                          .value;
  return head + tail;
}

}  // namespace cmak
