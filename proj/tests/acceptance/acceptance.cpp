#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cmak/cmak.hpp"

using namespace cmak;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "] ";
    }
  }
};

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double pow2(int k) { return std::ldexp(1.0, k); }

double factorial(int n) {
  double f = 1.0;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

CarmaModel carma10() { return CarmaModel::create(vec({1.0}), vec({1.0}), 1.0); }
CarmaModel carma20() { return CarmaModel::create(vec({3.0, 2.0}), vec({1.0}), 1.0); }
CarmaModel carma21() { return CarmaModel::create(vec({3.0, 2.0}), vec({0.5, 1.0}), 1.0); }
CarmaModel carma31() { return CarmaModel::create(vec({6.0, 11.0, 6.0}), vec({0.5, 1.0}), 1.0); }

double exact_sigma2_delta(const CarmaModel& m, double delta) {
  return kolmogorov_sigma2([&](double w) { return sampled_spectral_density_exact(m, delta, w); });
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm() / double(a.size()));
}

// Criterion 1: CARMA(1,0) closed forms.
void criterion_1(Outcome& o) {
  const CarmaModel m = carma10();
  double psi_err = 0.0;
  for (int k = 2; k <= 8; ++k) {
    const double d = pow2(-k);
    const Eigen::VectorXd psi = asymptotic_psi(m, d, 200);
    for (int j = 0; j <= 200; ++j) psi_err = std::max(psi_err, std::abs(psi(j) - std::exp(-j * d)));
  }
  o.detail << "max|psi - e^{-j delta}| = " << psi_err << "; ";
  o.check(psi_err <= 1e-12, "psi");

  const double d8 = pow2(-8);
  const double ratio = asymptotic_sigma2_delta(m, d8) / ((1.0 - std::exp(-2.0 * d8)) / 2.0);
  o.detail << "sigma2 ratio at 2^-8 = " << ratio << "; ";
  o.check(std::abs(ratio - 1.0) <= 0.01, "sigma2 ratio");

  auto sup_err = [&](double d) {
    const WoldApprox w = wold_kernel_approx(m, d, 8.0);
    double e = 0.0;
    const int cells = int(std::lround(8.0 / d));
    for (int j = 0; j < cells; ++j) {
      const double lo = j * d;
      const double hi = (j + 1) * d * (1.0 - 1e-13);
      e = std::max({e, std::abs(w(lo) - carma_kernel(m, lo > 0.0 ? lo : 1e-300)), std::abs(w(hi) - carma_kernel(m, hi))});
    }
    return e;
  };
  o.detail << "halving ratios:";
  double prev = sup_err(pow2(-4));
  for (int k = 5; k <= 8; ++k) {
    const double cur = sup_err(pow2(-k));
    const double r = prev / cur;
    o.detail << " " << r;
    o.check(r >= 1.6 && r <= 2.4, "first-order halving");
    prev = cur;
  }
}

// Criterion 2: alpha polynomials, root products, eta(3).
void criterion_2(Outcome& o) {
  const AlphaPolynomial a0 = alpha_polynomial(0), a1 = alpha_polynomial(1), a2 = alpha_polynomial(2);
  o.check(a0.numerator.size() == 1 && a0.numerator[0] == Rational(1), "alpha_0");
  o.check(a1.numerator.size() == 2 && a1.numerator[0] == Rational(-1, 2) && a1.numerator[1] == Rational(1, 6),
          "alpha_1");
  o.check(a2.numerator.size() == 3 && a2.numerator[0] == Rational(1, 4) && a2.numerator[1] == Rational(-1, 8) &&
              a2.numerator[2] == Rational(1, 120),
          "alpha_2");
  double worst = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const AlphaPolynomial a = alpha_polynomial(k);
    Complex prod = 1.0;
    for (Eigen::Index i = 0; i < a.xi.size(); ++i) prod *= a.xi(i);
    const double expected = factorial(2 * k + 1) / std::pow(2.0, k);
    worst = std::max(worst, std::abs(prod - expected) / expected);
  }
  o.detail << "max rel error of prod xi = " << worst << "; ";
  o.check(worst <= 1e-9, "root products");
  const double eta_err = std::abs(eta_of_xi(3.0) - Complex(2.0 - std::sqrt(3.0)));
  o.detail << "|eta(3) - (2 - sqrt 3)| = " << eta_err;
  o.check(eta_err <= 1e-12, "eta(3)");
}

// Criterion 3: C_alpha values and the shape of the curve.
void criterion_3(Outcome& o) {
  const double c2 = c_alpha(2.0), c4 = c_alpha(4.0), c6 = c_alpha(6.0);
  const AlphaPolynomial a2 = alpha_polynomial(2);
  const double c6_identity = 1.0 / (factorial(5) * (eta_of_xi(a2.xi(0)) * eta_of_xi(a2.xi(1))).real());
  o.detail << "C2 = " << c2 << ", C4 - target = " << c4 - 1.0 / (6.0 * (2.0 - std::sqrt(3.0)))
           << ", C6 - identity = " << c6 - c6_identity << "; ";
  o.check(std::abs(c2 - 1.0) <= 1e-6, "C2");
  o.check(std::abs(c4 - 1.0 / (6.0 * (2.0 - std::sqrt(3.0)))) <= 1e-6, "C4");
  o.check(std::abs(c6 - c6_identity) <= 1e-6, "C6");
  // Decreasing in alpha, unbounded as alpha -> 1, geometric decay (e / pi)^alpha for large alpha.
  double prev = c_alpha(1.1);
  bool decreasing = true;
  for (int i = 1; i <= 50; ++i) {
    const double alpha = 1.1 + (20.0 - 1.1) * i / 50.0;
    const double c = c_alpha(alpha);
    decreasing = decreasing && c < prev;
    prev = c;
  }
  const double tail_rate = c_alpha(20.0) / c_alpha(19.0);
  o.detail << "C_1.1 = " << c_alpha(1.1) << ", C_20 / C_19 = " << tail_rate << " (e/pi = " << std::exp(1.0) / M_PI
           << ")";
  o.check(decreasing, "monotone decrease on [1.1, 20]");
  o.check(c_alpha(1.1) > 2.0, "growth near alpha = 1");
  o.check(std::abs(tail_rate / (std::exp(1.0) / M_PI) - 1.0) < 0.01, "large-alpha decay rate");
}

// Criterion 4: sigma^2_delta leading term against the Kolmogorov formula.
void criterion_4(Outcome& o) {
  const std::vector<std::pair<std::string, CarmaModel>> models = {
      {"CARMA(2,0)", carma20()}, {"CARMA(2,1)", carma21()}, {"CARMA(3,1)", carma31()}};
  for (const auto& [name, m] : models) {
    double prev_gap = INFINITY;
    bool monotone = true;
    double last = 0.0;
    for (int k = 4; k <= 8; ++k) {
      const double d = pow2(-k);
      last = asymptotic_sigma2_delta(m, d) / exact_sigma2_delta(m, d);
      const double gap = std::abs(last - 1.0);
      monotone = monotone && gap < prev_gap;
      prev_gap = gap;
    }
    o.detail << name << " ratio at 2^-8 = " << last << "; ";
    o.check(last >= 0.98 && last <= 1.02, name + " ratio");
    o.check(monotone, name + " monotone");
  }
}

// Criterion 5: residue form against the aliasing sum.
void criterion_5(Outcome& o) {
  const CarmaModel m = carma21();
  auto f_y = [&](double w) { return carma_spectral_density(m, w); };
  double worst = 0.0;
  for (int k : {-8, -6, -4, -2, 0}) {
    for (double w : {0.1, 0.5, 1.0, 2.0, M_PI}) {
      const double d = pow2(k);
      const double exact = sampled_spectral_density_exact(m, d, w);
      worst = std::max(worst, std::abs(sampled_spectral_density_aliasing(f_y, d, w) / exact - 1.0));
    }
  }
  o.detail << "max relative difference = " << worst;
  o.check(worst < 1e-8, "aliasing equivalence");
}

// Criterion 6: Hurwitz zeta and the lattice-sum identity.
void criterion_6(Outcome& o) {
  const double e1 = std::abs(hurwitz_zeta(2.0, 1.0) - M_PI * M_PI / 6.0);
  const double e2 = std::abs(hurwitz_zeta(2.0, 0.5) - M_PI * M_PI / 2.0);
  const double e3 = std::abs(hurwitz_zeta(4.0, 1.0) - std::pow(M_PI, 4) / 90.0);
  o.detail << "zeta errors " << e1 << ", " << e2 << ", " << e3 << "; ";
  o.check(std::max({e1, e2, e3}) <= 1e-10, "zeta values");
  const long k_max = 200000;
  double worst = 0.0;
  for (double alpha : {5.0 / 3.0, 2.0, 4.0}) {
    for (double w : {0.05, 0.7, 2.0, M_PI}) {
      double sum = 0.0;
      for (long k = k_max; k >= 1; --k)
        sum += std::pow(2.0 * M_PI * k + w, -alpha) + std::pow(2.0 * M_PI * k - w, -alpha);
      // Tail beyond k_max by the midpoint integral.
      const double x = 2.0 * M_PI * (k_max + 0.5);
      sum += (std::pow(x + w, 1.0 - alpha) + std::pow(x - w, 1.0 - alpha)) / (2.0 * M_PI * (alpha - 1.0));
      sum += std::pow(w, -alpha);
      worst = std::max(worst, std::abs(aliasing_bracket(alpha, w) - sum));
    }
  }
  o.detail << "max |bracket - lattice sum| = " << worst;
  o.check(worst <= 1e-9, "lattice identity");
}

// Frozen from the first run with about 30% margin.
constexpr double kCriterion7DlMaxError = 0.006;
// Indexed [nu][delta][DL, innovations].
constexpr double kCriterion8Rmse[2][2][2] = {{{0.0102, 0.0102}, {0.0126, 0.0126}},
                                             {{0.0139, 0.0139}, {0.0056, 0.0056}}};
constexpr double kCriterion11LogRms = 0.075;

// Criterion 7: estimators on the exact gamma-kernel ACVF.
void criterion_7(Outcome& o) {
  const GammaKernelModel g = GammaKernelModel::create(2.0, 1.0);
  const double d = pow2(-4);
  Eigen::VectorXd gamma(401);
  for (Eigen::Index h = 0; h < gamma.size(); ++h) gamma(h) = gamma_acvf(g, double(h) * d);
  const AcvfSequence acvf = AcvfSequence::exact(gamma);
  const CmaKernel kernel = g.kernel();
  auto max_err = [&](KernelMethod method) {
    KernelEstimateOptions opts;
    opts.method = method;
    opts.m = 384;
    const KernelEstimate est = estimate_kernel(acvf, d, 8.0, opts);
    const Eigen::VectorXd t = est.times();
    double e = 0.0;
    for (Eigen::Index j = 0; j < t.size(); ++j)
      if (t(j) >= 0.5 && t(j) <= 8.0) e = std::max(e, std::abs(est.g_hat(j) - kernel(t(j))));
    return e;
  };
  const double dl = max_err(KernelMethod::durbin_levinson);
  const double inn = max_err(KernelMethod::innovations);
  o.detail << "DL max error = " << dl << " (threshold " << kCriterion7DlMaxError << "), innovations = " << inn;
  o.check(dl <= kCriterion7DlMaxError, "DL threshold");
  o.check(inn <= 2.0 * dl, "innovations within 2x DL");
}

// Criterion 8: simulate, estimate with both methods, compare to g.
void criterion_8(Outcome& o) {
  int dl_wins = 0;
  const double nus[2] = {1.05, 2.0};
  const int ks[2] = {2, 4};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const GammaKernelModel g = GammaKernelModel::create(nus[a], 1.0);
      const double d = pow2(-ks[b]);
      const Eigen::Index n = Eigen::Index(std::lround(8192.0 / d));
      const std::uint64_t seed = 1000 + 10 * a + b;
      const SampledSeries s =
          simulate_gaussian_cma([&](double h) { return gamma_acvf(g, h); }, SimulationPlan::create(d, n, seed, 1));
      const CmaKernel kernel = g.kernel();
      double errs[2];
      for (int method = 0; method < 2; ++method) {
        KernelEstimateOptions opts;
        opts.method = method == 0 ? KernelMethod::durbin_levinson : KernelMethod::innovations;
        const KernelEstimate est = estimate_kernel(s, 8.0, opts);
        const Eigen::VectorXd t = est.times();
        Eigen::VectorXd truth(t.size());
        for (Eigen::Index j = 0; j < t.size(); ++j) truth(j) = kernel(t(j));
        errs[method] = rmse(est.g_hat, truth);
      }
      if (errs[0] <= errs[1]) ++dl_wins;
      o.detail << "nu=" << nus[a] << " delta=2^-" << ks[b] << ": DL " << errs[0] << " / inn " << errs[1] << "; ";
      o.check(errs[0] <= kCriterion8Rmse[a][b][0], "DL RMSE threshold");
      o.check(errs[1] <= kCriterion8Rmse[a][b][1], "innovations RMSE threshold");
    }
  }
  o.detail << "DL better in " << dl_wins << " of 4";
  o.check(dl_wins >= 3, "DL <= innovations in >= 3 of 4");
}

// Criterion 9: CLT Monte Carlo for CAR(1).
void criterion_9(Outcome& o) {
  const CarmaModel m = carma10();
  McStudyConfig cfg;
  cfg.simulate = [&](const SimulationPlan& plan) { return simulate_carma_statespace(m, plan); };
  cfg.plan = SimulationPlan::create(0.05, 2000, 20240101, 1);
  cfg.estimator.method = KernelMethod::innovations;
  cfg.estimator.m = 60;
  cfg.t_max = 1.0;
  cfg.t_eval = 1.0;
  cfg.g_true = [&](double t) { return carma_kernel(m, t); };
  cfg.replications = 500;
  const McStudyResult r = mc_study(cfg);
  const McSummary& s = *r.summary;
  const double target = (1.0 - std::exp(-2.0)) / 2.0;
  o.detail << "variance = " << s.variance << " (target " << target << ", ratio " << s.variance / target
           << "), mean = " << s.mean << " (s.e. " << s.std_error << "), JB p = " << s.normality_p_value;
  o.check(s.variance >= 0.8 * target && s.variance <= 1.2 * target, "variance band");
  o.check(std::abs(s.mean) <= 3.0 * s.std_error, "mean within 3 s.e.");
}

// Criterion 10: structure-function regimes for the gamma kernel.
void criterion_10(Outcome& o) {
  const double d = pow2(-10);
  for (double nu : {0.75, 1.5, 2.0}) {
    const GammaKernelModel g = GammaKernelModel::create(nu, 1.0);
    const double s2 = structure_function([&](double h) { return gamma_acvf(g, h); }, d);
    const double ratio = s2 / (2.0 * g.variance()) / gamma_structure_leading_term(nu, 1.0, d);
    o.detail << "nu=" << nu << " ratio " << ratio << "; ";
    o.check(std::abs(ratio - 1.0) <= 0.05, "nu = " + std::to_string(nu));
  }
}

// Criterion 11: spectral round trip on a gamma nu = 5/6 path.
void criterion_11(Outcome& o) {
  const double nu = 5.0 / 6.0;
  const GammaKernelModel g = GammaKernelModel::create(nu, 1.0);
  const double d = pow2(-6);
  const Eigen::Index n = Eigen::Index(1) << 20;
  const SampledSeries s =
      simulate_gaussian_cma([&](double h) { return gamma_acvf(g, h); }, SimulationPlan::create(d, n, 555, 1));
  const SpectralFunction w = welch(s, 1 << 13).to_continuous(d);
  const double lo = 8.0, hi = 40.0;
  const double slope = tail_index_diagnostic(w.freqs, w.values, lo, hi);

  // Slope of the exact sampled density over the same band, for reference.
  Eigen::VectorXd ef(64), ev(64);
  for (int i = 0; i < 64; ++i) {
    ef(i) = lo * std::pow(hi / lo, i / 63.0);
    ev(i) = d * sampled_spectral_density_aliasing(
                    [&](double x) { return gamma_kernel_spectral_density(nu, 1.0, 1.0, x); }, d, ef(i) * d);
  }
  const double exact_slope = tail_index_diagnostic(ef, ev, lo, hi);

  KernelEstimateOptions opts;
  const KernelEstimate est = estimate_kernel(s, 8.0, opts);
  std::vector<double> band_f;
  for (Eigen::Index i = 0; i < w.freqs.size(); ++i)
    if (w.freqs(i) >= 0.5 && w.freqs(i) <= hi) band_f.push_back(w.freqs(i));
  const Eigen::VectorXd omegas = Eigen::Map<Eigen::VectorXd>(band_f.data(), Eigen::Index(band_f.size()));
  const SpectralFunction k = spectrum_from_kernel(est, omegas);
  double sum = 0.0;
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < w.freqs.size(); ++i) {
    if (w.freqs(i) < 0.5 || w.freqs(i) > hi) continue;
    sum += std::pow(std::log(k.values(j++) / w.values(i)), 2);
  }
  const double log_rms = std::sqrt(sum / double(j));
  o.detail << "Welch tail index = " << slope << " (exact f_delta " << exact_slope << ") over [" << lo << ", " << hi
           << "] rad/time; kernel-vs-Welch log RMS = " << log_rms << " (threshold " << kCriterion11LogRms << ")";
  o.check(std::abs(slope - 5.0 / 3.0) <= 0.05, "tail index");
  o.check(log_rms <= kCriterion11LogRms, "log RMS");
}

// Criterion 12: first-difference variance of CARMA(1,0).
void criterion_12(Outcome& o) {
  const CarmaModel m = carma10();
  const RegVaryingSpectrum spec = RegVaryingSpectrum::carma(m);
  const double d = pow2(-8);
  const double exact = 2.0 * (carma_autocovariance(m, 0.0) - carma_autocovariance(m, d));
  const double asym = 2.0 * s_p_alpha(1, 2.0) * spec.ell_limit.value() * d;
  o.detail << "ratio = " << exact / asym;
  o.check(std::abs(exact / asym - 1.0) <= 0.02, "ratio");
}

struct Criterion {
  std::function<void(Outcome&)> run;
  double budget_seconds;
  const char* title;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {criterion_1, 1.0, "CARMA(1,0) closed forms"},
      {criterion_2, 1.0, "alpha-polynomial identities"},
      {criterion_3, 10.0, "C_alpha"},
      {criterion_4, 30.0, "sigma^2_delta against Kolmogorov"},
      {criterion_5, 5.0, "aliasing equivalence"},
      {criterion_6, 1.0, "Hurwitz zeta"},
      {criterion_7, 30.0, "estimators on exact ACVF"},
      {criterion_8, 300.0, "simulation study"},
      {criterion_9, 300.0, "CLT Monte Carlo"},
      {criterion_10, 1.0, "structure-function asymptotics"},
      {criterion_11, 120.0, "spectral round trip"},
      {criterion_12, 10.0, "first-difference variance"},
  };
  return list;
}

bool run_one(int index) {
  const Criterion& c = criteria()[index - 1];
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    c.run(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "[exception: " << e.what() << "]";
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (elapsed > c.budget_seconds) {
    o.pass = false;
    o.detail << " [runtime over budget]";
  }
  std::printf("%s criterion %d (%s): %s [%.2f s, budget %.0f s]\n", o.pass ? "PASS" : "FAIL", index, c.title,
              o.detail.str().c_str(), elapsed, c.budget_seconds);
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty())
    for (int i = 1; i <= int(criteria().size()); ++i) selected.push_back(i);
  bool all = true;
  for (int index : selected) {
    if (index < 1 || index > int(criteria().size())) {
      std::fprintf(stderr, "unknown criterion %d\n", index);
      return 2;
    }
    all = run_one(index) && all;
  }
  return all ? 0 : 1;
}
