#include "cmak/wold.hpp"

#include <cmath>
#include <sstream>

#include "cmak/error.hpp"

namespace cmak {

namespace {

using Poly = std::vector<Rational>;

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// e^z - 1 without cancellation for small |z|.
Complex expm1(Complex z) {
  const double a = z.real();
  const double b = z.imag();
  const double s = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

}  // namespace

AlphaPolynomial alpha_polynomial(int k) {
  if (k < 0) fail(ErrorCode::InvalidArgument, "alpha polynomial index must be nonnegative");
  if (k > kMaxAlphaOrder) {
    std::ostringstream msg;
    msg << "alpha polynomial index " << k << " exceeds " << kMaxAlphaOrder;
    fail(ErrorCode::OrderTooLarge, msg.str());
  }
  // P_k(x) = x^k / (2k+1)! - sum_{j=1}^k x^{j-1} P_{k-j}(x) / (2j)!, with alpha_k = P_k / x^{k+1}.
  std::vector<Poly> numerators;
  numerators.push_back(Poly{Rational(1)});
  for (int n = 1; n <= k; ++n) {
    Poly next(n + 1, Rational(0));
    next[n] = Rational(1) / Rational(factorial(2 * n + 1));
    for (int j = 1; j <= n; ++j) {
      const Rational inv = Rational(1) / Rational(factorial(2 * j));
      const Poly& prev = numerators[n - j];
      for (std::size_t i = 0; i < prev.size(); ++i) next[i + j - 1] -= prev[i] * inv;
    }
    numerators.push_back(std::move(next));
  }

  AlphaPolynomial alpha;
  alpha.k = k;
  alpha.numerator = numerators[k];
  alpha.factorial = factorial(2 * k + 1);
  if (k > 0) {
    alpha.xi = poly_roots(alpha.monic_numerator());
  } else {
    alpha.xi.resize(0);
  }
  return alpha;
}

Eigen::VectorXd AlphaPolynomial::monic_numerator() const {
  Eigen::VectorXd out(numerator.size());
  for (std::size_t i = 0; i < numerator.size(); ++i) {
    out(Eigen::Index(i)) = static_cast<double>(numerator[i] * Rational(factorial));
  }
  return out;
}

double AlphaPolynomial::evaluate(double x) const {
  double acc = 0.0;
  for (auto it = numerator.rbegin(); it != numerator.rend(); ++it) acc = acc * x + static_cast<double>(*it);
  return acc / std::pow(x, k + 1);
}

Complex eta_of_xi(Complex xi) {
  require(std::abs(xi) > 0.0, ErrorCode::DomainError, "eta(xi) undefined at xi = 0");
  const Complex shifted = xi - 1.0;
  const Complex root = std::sqrt(shifted * shifted - 1.0);
  const Complex plus = shifted + root;
  const Complex minus = shifted - root;
  if (std::abs(std::abs(plus) - 1.0) <= 1e-12 && std::abs(std::abs(minus) - 1.0) <= 1e-12) {
    fail(ErrorCode::UnitModulusBranch, "both branches of eta(xi) lie on the unit circle");
  }
  // The branches multiply to one, so the smaller one is strictly inside the unit disc. Computing it
  // as the reciprocal of the larger avoids cancellation when |xi| is large.
  const Complex big = std::abs(plus) >= std::abs(minus) ? plus : minus;
  return 1.0 / big;
}

MaFactorization ma_factorization(const CarmaModel& model, double delta) {
  require(delta > 0.0, ErrorCode::DomainError, "sampling interval must be positive");
  const int pq = model.p() - model.q();
  MaFactorization f;
  f.delta = delta;
  const AlphaPolynomial alpha = alpha_polynomial(pq - 1);
  f.eta.resize(alpha.xi.size());
  for (Eigen::Index i = 0; i < alpha.xi.size(); ++i) f.eta(i) = eta_of_xi(alpha.xi(i));
  f.zeta.resize(model.q());
  for (int k = 0; k < model.q(); ++k) f.zeta(k) = 1.0 + model.ma_roots()[k] * delta;

  Complex denom = Complex(static_cast<double>(factorial(2 * pq - 1)), 0.0);
  for (Eigen::Index i = 0; i < f.eta.size(); ++i) denom *= f.eta(i);
  for (Eigen::Index k = 0; k < f.zeta.size(); ++k) denom *= f.zeta(k);
  const double a1 = model.ar()(0);
  const Complex value = std::pow(delta, 2 * pq - 1) * std::exp(-a1 * delta) * model.sigma2() / denom;
  f.sigma2_delta = checked_real(value, kRealnessTol);
  require(f.sigma2_delta > 0.0, ErrorCode::DomainError, "asymptotic innovation variance is not positive");
  return f;
}

Eigen::VectorXd expand_ma_polynomial(const MaFactorization& factorization) {
  Eigen::VectorXcd w(factorization.eta.size() + factorization.zeta.size());
  // (1 + eta B) = (1 - (-eta) B)
  w << -factorization.eta, factorization.zeta;
  return checked_real(poly_from_reciprocal_factors(w), kRealnessTol);
}

double asymptotic_sigma2_delta(const CarmaModel& model, double delta) {
  return ma_factorization(model, delta).sigma2_delta;
}

double carma_wold_constant(int p_minus_q) {
  require(p_minus_q >= 1, ErrorCode::DomainError, "p - q must be positive");
  const AlphaPolynomial alpha = alpha_polynomial(p_minus_q - 1);
  Complex prod = static_cast<double>(factorial(2 * p_minus_q - 1));
  for (Eigen::Index i = 0; i < alpha.xi.size(); ++i) prod *= eta_of_xi(alpha.xi(i));
  return 1.0 / checked_real(prod, kRealnessTol);
}

Eigen::VectorXd asymptotic_psi(const CarmaModel& model, double delta, Eigen::Index j_max) {
  require(j_max >= 0, ErrorCode::InvalidArgument, "j_max must be nonnegative");
  const MaFactorization f = ma_factorization(model, delta);
  const auto& lam = model.ar_roots().roots;
  const auto& mu = model.ma_roots().roots;
  const Eigen::Index p = lam.size();

  Eigen::VectorXcd weight(p);
  for (Eigen::Index r = 0; r < p; ++r) {
    const Complex back = std::exp(-lam(r) * delta);
    Complex num{1.0, 0.0};
    for (Eigen::Index i = 0; i < f.eta.size(); ++i) num *= 1.0 + f.eta(i) * back;
    // 1 - (1 + mu delta) e^{-lambda delta}
    for (Eigen::Index k = 0; k < mu.size(); ++k) num *= -expm1(-lam(r) * delta) - mu(k) * delta * back;
    Complex den{1.0, 0.0};
    for (Eigen::Index m = 0; m < p; ++m) {
      if (m == r) continue;
      const Complex factor = -expm1((lam(m) - lam(r)) * delta);
      require(std::abs(factor) > 1e-300, ErrorCode::NearMultipleRoots, "coincident sampled autoregressive roots");
      den *= factor;
    }
    weight(r) = num / den;
  }

  Eigen::VectorXd psi(j_max + 1);
  for (Eigen::Index j = 0; j <= j_max; ++j) {
    Complex acc{0.0, 0.0};
    for (Eigen::Index r = 0; r < p; ++r) acc += weight(r) * std::exp(double(j) * lam(r) * delta);
    psi(j) = checked_real(acc, 1e-8);
  }
  require(psi(0) != 0.0, ErrorCode::DomainError, "leading Wold coefficient vanished");
  psi /= psi(0);
  return psi;
}

double WoldApprox::scale() const { return std::sqrt(sigma2_delta / delta); }

double WoldApprox::operator()(double t) const {
  if (t < 0.0) return 0.0;
  const double cell = std::floor(t / delta);
  if (cell >= double(psi.size())) return 0.0;
  return scale() * psi(Eigen::Index(cell));
}

WoldApprox wold_kernel_approx(const CarmaModel& model, double delta, double t_max) {
  require(delta > 0.0 && t_max > 0.0, ErrorCode::DomainError, "delta and t_max must be positive");
  WoldApprox approx;
  approx.delta = delta;
  approx.sigma2_delta = asymptotic_sigma2_delta(model, delta);
  approx.psi = asymptotic_psi(model, delta, Eigen::Index(std::ceil(t_max / delta)));
  return approx;
}

}  // namespace cmak
