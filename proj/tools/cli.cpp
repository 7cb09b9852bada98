#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmak/cmak.hpp"
#include "io.hpp"

namespace cmak::cli {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;

struct ModelOptions {
  std::string kind = "gamma";
  double nu = 2.0;
  double lambda = 1.0;
  double sigma2 = 1.0;
  std::vector<double> ar{1.0};
  std::vector<double> ma{1.0};
};

struct Model {
  std::optional<GammaKernelModel> gamma;
  std::optional<CarmaModel> carma;

  std::function<double(double)> acvf() const {
    if (gamma) return [g = *gamma](double h) { return gamma_acvf(g, h); };
    return [c = *carma](double h) { return carma_autocovariance(c, h); };
  }

  /// sigma g(t).
  std::function<double(double)> kernel() const {
    if (gamma) {
      const double scale = std::sqrt(gamma->sigma2);
      const CmaKernel k = gamma->kernel();
      return [scale, k](double t) { return scale * k(t); };
    }
    const double scale = std::sqrt(carma->sigma2());
    return [scale, c = *carma](double t) { return scale * carma_kernel(c, t); };
  }

  json describe() const {
    if (gamma) return {{"kind", "gamma"}, {"nu", gamma->nu}, {"lambda", gamma->lambda}, {"sigma2", gamma->sigma2}};
    std::vector<double> ar(carma->ar().data(), carma->ar().data() + carma->ar().size());
    std::vector<double> ma(carma->ma().data(), carma->ma().data() + carma->ma().size());
    return {{"kind", "carma"}, {"ar", ar}, {"ma", ma}, {"sigma2", carma->sigma2()}};
  }
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
}

Model build_model(const ModelOptions& o) {
  Model m;
  if (o.kind == "gamma") {
    m.gamma = GammaKernelModel::create(o.nu, o.lambda, o.sigma2);
  } else {
    m.carma = CarmaModel::create(to_vector(o.ar), to_vector(o.ma), o.sigma2);
  }
  return m;
}

void add_model_options(CLI::App* app, ModelOptions& o) {
  app->add_option("--model", o.kind, "Kernel family")->check(CLI::IsMember({"gamma", "carma"}))->capture_default_str();
  app->add_option("--nu", o.nu, "Gamma kernel shape")->capture_default_str();
  app->add_option("--lambda", o.lambda, "Gamma kernel rate")->capture_default_str();
  app->add_option("--sigma2", o.sigma2, "Driving variance")->capture_default_str();
  app->add_option("--ar", o.ar, "CARMA a_1..a_p")->delimiter(',');
  app->add_option("--ma", o.ma, "CARMA b_0..b_q")->delimiter(',');
}

struct EstimatorOptions {
  std::string method = "dl";
  std::optional<int> m;
  std::string m_rule = "3n";
  double h = 0.5;
  double t_max = 8.0;
};

void add_estimator_options(CLI::App* app, EstimatorOptions& o) {
  app->add_option("--method", o.method, "Kernel estimator")
      ->check(CLI::IsMember({"dl", "durbin-levinson", "innovations"}))
      ->capture_default_str();
  app->add_option("--m", o.m, "Fit order (default 3N)")->check(CLI::PositiveNumber);
  app->add_option("--m-rule", o.m_rule, "Default order rule")->check(CLI::IsMember({"3n", "theorem"}))->capture_default_str();
  app->add_option("--h", o.h, "Offset within a grid cell")->check(CLI::Range(0.0, 0.999999))->capture_default_str();
  app->add_option("--tmax", o.t_max, "Kernel horizon")->check(CLI::NonNegativeNumber)->capture_default_str();
}

KernelEstimateOptions to_estimate_options(const EstimatorOptions& o) {
  KernelEstimateOptions k;
  k.method = o.method == "innovations" ? KernelMethod::innovations : KernelMethod::durbin_levinson;
  k.m = o.m;
  k.m_rule = o.m_rule == "theorem" ? MRule::theorem : MRule::three_n;
  k.offset_h = o.h;
  return k;
}

std::string method_name(KernelMethod m) { return m == KernelMethod::innovations ? "innovations" : "durbin-levinson"; }

json kernel_summary(const KernelEstimate& est) {
  json j = {{"method", method_name(est.method)},
            {"m", est.m_used},
            {"delta", est.delta},
            {"h", est.offset_h},
            {"points", est.g_hat.size()},
            {"innovation_variance", est.innovation_variance},
            {"warnings", est.warnings}};
  if (est.n_obs) j["n"] = *est.n_obs;
  return j;
}

void write_kernel_csv(const std::string& path, const KernelEstimate& est) {
  if (est.band.size() > 0) {
    io::write_csv(path, {"t", "g_hat", "band"}, {est.times(), est.g_hat, est.band});
  } else {
    io::write_csv(path, {"t", "g_hat"}, {est.times(), est.g_hat});
  }
}

Eigen::VectorXd linspace(double from, double to, int points) {
  if (points == 1) return Eigen::VectorXd::Constant(1, from);
  return Eigen::VectorXd::LinSpaced(points, from, to);
}

// Writes CSV to `path`, or to `out` when no path is given.
json emit_table(const std::string& path, const std::vector<std::string>& header,
                const std::vector<Eigen::VectorXd>& columns, std::ostream& out) {
  if (path.empty()) {
    out << io::csv_string(header, columns);
    return nullptr;
  }
  io::write_csv(path, header, columns);
  return {{"output", path}, {"rows", columns.empty() ? 0 : columns.front().size()}};
}

// ---- simulate ----

struct SimulateOptions {
  ModelOptions model;
  double delta = 0.0625;
  Eigen::Index n = 0;
  std::uint64_t seed = 0;
  int refine = kDefaultRefinement;
  std::string method = "auto";
  std::string driver = "gaussian";
  double rate = 100.0;
  std::string out = "series.csv";
};

json run_simulate(const SimulateOptions& o) {
  const Model model = build_model(o.model);
  SimulationPlan plan = SimulationPlan::create(o.delta, o.n, o.seed, o.refine);
  if (o.driver == "poisson") plan.driver = Driver{DriverKind::compound_poisson, o.rate};

  std::string method = o.method;
  if (method == "auto") method = model.carma ? "statespace" : "circulant";
  require(!(method == "statespace" && model.gamma), ErrorCode::ConfigError,
          "state-space simulation needs a CARMA model");
  require(!(plan.driver.kind == DriverKind::compound_poisson && method != "statespace"), ErrorCode::ConfigError,
          "the compound Poisson driver is only available for state-space CARMA simulation");

  SimulationDiagnostics diag;
  const SampledSeries series = method == "statespace" ? simulate_carma_statespace(*model.carma, plan)
                                                      : simulate_gaussian_cma(model.acvf(), plan, &diag);
  json meta = {{"seed", o.seed},
               {"model", model.describe()},
               {"method", method},
               {"refine", o.refine},
               {"driver", o.driver},
               {"warnings", diag.warnings}};
  if (plan.driver.kind == DriverKind::compound_poisson) meta["rate"] = o.rate;
  io::write_series(o.out, series, meta);
  return {{"command", "simulate"}, {"output", o.out}, {"sidecar", io::sidecar_path(o.out)}, {"n", series.n()},
          {"delta", series.delta}, {"warnings", diag.warnings}};
}

// ---- estimate ----

struct EstimateOptions {
  std::string input;
  bool from_exact = false;
  ModelOptions model;
  std::optional<double> delta;
  EstimatorOptions estimator;
  std::string out = "kernel.csv";
  std::string summary;
};

json run_estimate(const EstimateOptions& o) {
  const KernelEstimateOptions options = to_estimate_options(o.estimator);
  KernelEstimate est;
  if (o.from_exact) {
    require(o.delta.has_value(), ErrorCode::ConfigError, "--from-exact-acvf needs --delta");
    const Model model = build_model(o.model);
    const Eigen::Index points = Eigen::Index(std::floor(o.estimator.t_max / *o.delta + 1e-9));
    const Eigen::Index lags = (options.m ? *options.m : 3 * points) + 1;
    const auto acvf = model.acvf();
    Eigen::VectorXd gamma(lags);
    for (Eigen::Index k = 0; k < lags; ++k) gamma(k) = acvf(double(k) * *o.delta);
    est = estimate_kernel(AcvfSequence::exact(gamma), *o.delta, o.estimator.t_max, options);
  } else {
    require(!o.input.empty(), ErrorCode::ConfigError, "pass --input or --from-exact-acvf");
    const SampledSeries series = io::read_series(o.input, o.delta);
    est = estimate_kernel(series, o.estimator.t_max, options);
  }
  write_kernel_csv(o.out, est);
  json summary = kernel_summary(est);
  summary["command"] = "estimate";
  summary["output"] = o.out;
  summary["source"] = o.from_exact ? "exact-acvf" : o.input;
  io::write_json(o.summary.empty() ? io::sidecar_path(o.out) : o.summary, summary);
  return summary;
}

// ---- asymptotics ----

struct AsymptoticsOptions {
  double from = 1.1;
  double to = 20.0;
  int points = 100;
  int p = 1;
  int pq = 2;
  int k_min = 2;
  int k_max = 10;
  ModelOptions model;
  std::string out;
};

json run_c_alpha(const AsymptoticsOptions& o, std::ostream& out) {
  require(o.from > 1.0 && o.to <= 40.0 && o.to >= o.from, ErrorCode::DomainError, "alpha grid must lie in (1, 40]");
  const Eigen::VectorXd alpha = linspace(o.from, o.to, o.points);
  Eigen::VectorXd c(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) c(i) = c_alpha(alpha(i));
  return emit_table(o.out, {"alpha", "c_alpha"}, {alpha, c}, out);
}

json run_s_p_alpha(const AsymptoticsOptions& o, std::ostream& out) {
  require(o.p >= 1 && o.from > 1.0 && o.to < 2.0 * o.p + 1.0 && o.to >= o.from, ErrorCode::DomainError,
          "alpha grid must lie in (1, 2p + 1)");
  const Eigen::VectorXd alpha = linspace(o.from, o.to, o.points);
  Eigen::VectorXd s(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) s(i) = s_p_alpha(o.p, alpha(i));
  return emit_table(o.out, {"alpha", "s_p_alpha"}, {alpha, s}, out);
}

json run_sigma2(const AsymptoticsOptions& o, std::ostream& out) {
  require(o.model.kind == "carma", ErrorCode::ConfigError, "sigma2 tables need --model carma");
  require(o.k_min <= o.k_max, ErrorCode::DomainError, "need kmin <= kmax");
  const CarmaModel model = *build_model(o.model).carma;
  const Eigen::Index rows = o.k_max - o.k_min + 1;
  Eigen::VectorXd delta(rows), asym(rows), exact(rows), ratio(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    delta(i) = std::ldexp(1.0, -(o.k_min + int(i)));
    asym(i) = asymptotic_sigma2_delta(model, delta(i));
    exact(i) = kolmogorov_sigma2([&](double w) { return sampled_spectral_density_exact(model, delta(i), w); });
    ratio(i) = asym(i) / exact(i);
  }
  return emit_table(o.out, {"delta", "asymptotic", "kolmogorov", "ratio"}, {delta, asym, exact, ratio}, out);
}

json run_xi(const AsymptoticsOptions& o, std::ostream& out) {
  require(o.pq >= 1 && o.pq - 1 <= kMaxAlphaOrder, ErrorCode::OrderTooLarge, "p - q must lie in [1, 13]");
  const AlphaPolynomial alpha = alpha_polynomial(o.pq - 1);
  const Eigen::Index k = alpha.xi.size();
  Eigen::VectorXd index(k), xr(k), xi(k), er(k), ei(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Complex eta = eta_of_xi(alpha.xi(i));
    index(i) = double(i + 1);
    xr(i) = alpha.xi(i).real();
    xi(i) = alpha.xi(i).imag();
    er(i) = eta.real();
    ei(i) = eta.imag();
  }
  json summary = emit_table(o.out, {"i", "xi_re", "xi_im", "eta_re", "eta_im"}, {index, xr, xi, er, ei}, out);
  if (!summary.is_null()) summary["wold_constant"] = carma_wold_constant(o.pq);
  return summary;
}

// ---- spectrum ----

struct SpectrumOptions {
  std::string input;
  std::optional<double> delta;
  std::optional<Eigen::Index> segment;
  double overlap = 0.5;
  double splice_hz = 1e-3;
  std::optional<double> tail_lo;
  std::optional<double> tail_hi;
  Eigen::Index max_lag = 1000;
  EstimatorOptions estimator;
  std::string prefix = "spectrum";
};

json run_spectrum(const SpectrumOptions& o) {
  const SampledSeries series = io::read_series(o.input, o.delta);
  const double delta = series.delta;
  json summary = {{"command", "spectrum"}, {"input", o.input}, {"delta", delta}, {"n", series.n()}};

  const Eigen::Index max_lag = std::min(o.max_lag, series.n() - 1);
  const AcvfSequence acvf = sample_acvf(series, max_lag);
  Eigen::VectorXd lag_time(max_lag + 1);
  for (Eigen::Index k = 0; k <= max_lag; ++k) lag_time(k) = double(k) * delta;
  const Eigen::VectorXd acf = acvf.gamma(0) > 0.0 ? Eigen::VectorXd(acvf.gamma / acvf.gamma(0))
                                                  : Eigen::VectorXd::Zero(max_lag + 1);
  io::write_csv(o.prefix + "_acf.csv", {"lag", "acf"}, {lag_time, acf});

  const Eigen::Index segment = o.segment.value_or(default_welch_segment(series.n()));
  const SpectralFunction w = welch(series, segment, o.overlap).to_continuous(delta).to_hertz();
  const SpectralFunction p = periodogram(series).to_continuous(delta).to_hertz();
  std::vector<double> freqs, values;
  std::vector<double> source;
  for (Eigen::Index i = 0; i < p.freqs.size() && p.freqs(i) <= o.splice_hz; ++i) {
    freqs.push_back(p.freqs(i));
    values.push_back(p.values(i));
    source.push_back(0.0);
  }
  for (Eigen::Index i = 0; i < w.freqs.size(); ++i) {
    if (w.freqs(i) <= o.splice_hz) continue;
    freqs.push_back(w.freqs(i));
    values.push_back(w.values(i));
    source.push_back(1.0);
  }
  io::write_csv(o.prefix + "_spectrum.csv", {"hz", "density", "welch"},
                {to_vector(freqs), to_vector(values), to_vector(source)});

  const KernelEstimate est = estimate_kernel(series, o.estimator.t_max, to_estimate_options(o.estimator));
  write_kernel_csv(o.prefix + "_kernel.csv", est);
  const SpectralFunction ks = spectrum_from_kernel(est, 2.0 * kPi * w.freqs).to_hertz();
  io::write_csv(o.prefix + "_kernel_spectrum.csv", {"hz", "density"}, {ks.freqs, ks.values});

  const double nyquist = 0.5 / delta;
  const double lo = o.tail_lo.value_or(nyquist / 100.0);
  const double hi = o.tail_hi.value_or(nyquist / 10.0);
  summary["tail_band_hz"] = {lo, hi};
  try {
    summary["tail_index"] = tail_index_diagnostic(w.freqs, w.values, lo, hi);
  } catch (const Error& e) {
    if (o.tail_lo || o.tail_hi) throw;
    summary["tail_index"] = nullptr;
    summary["tail_index_error"] = e.what();
  }
  summary["welch"] = {{"segment", segment}, {"segments", w.segments}, {"overlap", o.overlap}, {"window", "hamming"}};
  summary["splice_hz"] = o.splice_hz;
  summary["kernel"] = kernel_summary(est);
  summary["notes"] = ks.notes;
  summary["outputs"] = {o.prefix + "_acf.csv", o.prefix + "_spectrum.csv", o.prefix + "_kernel.csv",
                        o.prefix + "_kernel_spectrum.csv"};
  io::write_json(o.prefix + ".json", summary);
  return summary;
}

// ---- mc-study ----

struct McOptions {
  ModelOptions model;
  double delta = 0.05;
  Eigen::Index n = 2000;
  int reps = 500;
  std::uint64_t seed = 1;
  int refine = kDefaultRefinement;
  double t = 1.0;
  std::optional<double> t_max;
  EstimatorOptions estimator;
  int threads = 0;
  std::string compare = "grid";
  std::string out = "mc.csv";
  std::string summary;
};

json run_mc_study(const McOptions& o) {
  const Model model = build_model(o.model);
  McStudyConfig cfg;
  cfg.plan = SimulationPlan::create(o.delta, o.n, o.seed, model.carma ? 1 : o.refine);
  if (model.carma) {
    cfg.simulate = [c = *model.carma](const SimulationPlan& plan) { return simulate_carma_statespace(c, plan); };
  } else {
    cfg.simulate = [acvf = model.acvf()](const SimulationPlan& plan) { return simulate_gaussian_cma(acvf, plan); };
  }
  cfg.estimator = to_estimate_options(o.estimator);
  cfg.t_eval = o.t;
  cfg.t_max = o.t_max.value_or(o.t);
  cfg.g_true = model.kernel();
  cfg.compare_on_grid = o.compare == "grid";
  cfg.replications = o.reps;
  cfg.threads = o.threads;
  const McStudyResult result = mc_study(cfg);

  Eigen::VectorXd index(o.reps), g_hat(o.reps), scaled(o.reps);
  for (int i = 0; i < o.reps; ++i) {
    index(i) = result.rows[i].index;
    g_hat(i) = result.rows[i].g_hat;
    scaled(i) = result.rows[i].scaled_error;
  }
  io::write_csv(o.out, {"replication", "g_hat", "scaled_error"}, {index, g_hat, scaled});
  json summary = {{"command", "mc-study"},
                  {"output", o.out},
                  {"replications", o.reps},
                  {"t_compare", result.t_compare},
                  {"g_compare", result.g_compare},
                  {"model", model.describe()}};
  if (result.summary) {
    const McSummary& s = *result.summary;
    summary["summary"] = {{"mean", s.mean},
                          {"variance", s.variance},
                          {"std_error", s.std_error},
                          {"skewness", s.skewness},
                          {"excess_kurtosis", s.excess_kurtosis},
                          {"jarque_bera", s.jarque_bera},
                          {"normality_p_value", s.normality_p_value},
                          {"limit_variance", s.limit_variance}};
  }
  io::write_json(o.summary.empty() ? io::sidecar_path(o.out) : o.summary, summary);
  return summary;
}

// ---- config files ----

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return io::format_double(v.get<double>());
  fail(ErrorCode::ConfigError, "unsupported config value " + v.dump());
}

bool mentions_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Replaces --config FILE with the file's options, letting explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) fail(ErrorCode::ConfigError, "--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;

  CLI::App* target = &app;
  for (const auto& a : rest) {
    if (a.empty() || a[0] == '-') continue;
    CLI::App* sub = nullptr;
    try {
      sub = target->get_subcommand(a);
    } catch (const CLI::OptionNotFound&) {
      sub = nullptr;
    }
    if (!sub) break;
    target = sub;
  }
  if (target == &app) fail(ErrorCode::ConfigError, "--config needs a subcommand");

  const json config = io::read_json(path);
  if (!config.is_object()) fail(ErrorCode::ConfigError, path + ": config must be a JSON object");
  std::vector<std::string> extra;
  for (const auto& [key, value] : config.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    const std::string flag = "--" + name;
    const CLI::Option* opt = target->get_option_no_throw(flag);
    if (!opt) fail(ErrorCode::ConfigError, path + ": unknown key '" + key + "' for " + target->get_name());
    if (mentions_flag(rest, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
    } else if (value.is_array()) {
      extra.push_back(flag);
      for (const auto& item : value) extra.push_back(json_scalar(item));
    } else {
      extra.push_back(flag);
      extra.push_back(json_scalar(value));
    }
  }
  rest.insert(rest.end(), extra.begin(), extra.end());
  return rest;
}

int report_error(std::ostream& err, const std::string& code, const std::string& message, int status) {
  err << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
  return status;
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
      return 2;
    case ErrorCode::IoError:
      return 3;
    default:
      return 1;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel estimation for continuous-time moving average processes", "cmak"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a sampled CMA path");
  add_model_options(simulate, sim.model);
  simulate->add_option("--delta", sim.delta, "Output spacing")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--n", sim.n, "Output length")->required()->check(CLI::Range(Eigen::Index(2), Eigen::Index(1) << 40));
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--refine", sim.refine, "Fine steps per output step")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--method", sim.method, "Simulator")
      ->check(CLI::IsMember({"auto", "circulant", "statespace"}))
      ->capture_default_str();
  simulate->add_option("--driver", sim.driver, "Driving process")
      ->check(CLI::IsMember({"gaussian", "poisson"}))
      ->capture_default_str();
  simulate->add_option("--rate", sim.rate, "Compound Poisson jump rate")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--out", sim.out, "Series file (.csv or .bin)")->capture_default_str();

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the kernel from a series or an exact ACVF");
  estimate->add_option("--input", est.input, "Series file");
  estimate->add_flag("--from-exact-acvf", est.from_exact, "Use the model autocovariance instead of data");
  add_model_options(estimate, est.model);
  estimate->add_option("--delta", est.delta, "Sampling interval")->check(CLI::PositiveNumber);
  add_estimator_options(estimate, est.estimator);
  estimate->add_option("--out", est.out, "Kernel CSV")->capture_default_str();
  estimate->add_option("--summary", est.summary, "Summary JSON (default <out>.json)");

  AsymptoticsOptions asy;
  auto* asymptotics = app.add_subcommand("asymptotics", "Tables of asymptotic constants");
  asymptotics->require_subcommand(1);
  auto* c_alpha_cmd = asymptotics->add_subcommand("c-alpha", "C_alpha over an alpha grid");
  auto* s_cmd = asymptotics->add_subcommand("s-p-alpha", "S_{p,alpha} over an alpha grid");
  auto* sigma_cmd = asymptotics->add_subcommand("sigma2", "Asymptotic against Kolmogorov sigma^2_delta");
  auto* xi_cmd = asymptotics->add_subcommand("xi", "Roots xi and eta for p - q");
  for (auto* sub : {c_alpha_cmd, s_cmd}) {
    sub->add_option("--from", asy.from, "First alpha")->capture_default_str();
    sub->add_option("--to", asy.to, "Last alpha")->capture_default_str();
    sub->add_option("--points", asy.points, "Grid size")->check(CLI::PositiveNumber)->capture_default_str();
  }
  s_cmd->add_option("--p", asy.p, "Power of (1 - cos w)")->check(CLI::PositiveNumber)->capture_default_str();
  add_model_options(sigma_cmd, asy.model);
  sigma_cmd->add_option("--kmin", asy.k_min, "Coarsest delta = 2^-kmin")->capture_default_str();
  sigma_cmd->add_option("--kmax", asy.k_max, "Finest delta = 2^-kmax")->capture_default_str();
  xi_cmd->add_option("--pq", asy.pq, "p - q")->required();
  for (auto* sub : {c_alpha_cmd, s_cmd, sigma_cmd, xi_cmd}) sub->add_option("--out", asy.out, "CSV path (default stdout)");

  SpectrumOptions spec;
  auto* spectrum = app.add_subcommand("spectrum", "ACF, spliced Welch/periodogram, kernel and kernel spectrum");
  spectrum->add_option("--input", spec.input, "Series file")->required();
  spectrum->add_option("--delta", spec.delta, "Sampling interval")->check(CLI::PositiveNumber);
  spectrum->add_option("--segment", spec.segment, "Welch segment length")->check(CLI::PositiveNumber);
  spectrum->add_option("--overlap", spec.overlap, "Welch overlap")->check(CLI::Range(0.0, 0.95))->capture_default_str();
  spectrum->add_option("--splice-hz", spec.splice_hz, "Periodogram below, Welch above")->capture_default_str();
  spectrum->add_option("--tail-lo", spec.tail_lo, "Tail-index band start (Hz)")->check(CLI::PositiveNumber);
  spectrum->add_option("--tail-hi", spec.tail_hi, "Tail-index band end (Hz)")->check(CLI::PositiveNumber);
  spectrum->add_option("--max-lag", spec.max_lag, "ACF lags")->check(CLI::PositiveNumber)->capture_default_str();
  add_estimator_options(spectrum, spec.estimator);
  spectrum->add_option("--out-prefix", spec.prefix, "Output prefix")->capture_default_str();

  McOptions mc;
  mc.model.kind = "carma";
  auto* mc_cmd = app.add_subcommand("mc-study", "Replicated simulate-estimate study at one time point");
  add_model_options(mc_cmd, mc.model);
  mc_cmd->add_option("--delta", mc.delta, "Sampling interval")->check(CLI::PositiveNumber)->capture_default_str();
  mc_cmd->add_option("--n", mc.n, "Observations per replication")->check(CLI::Range(Eigen::Index(2), Eigen::Index(1) << 40))->capture_default_str();
  mc_cmd->add_option("--reps", mc.reps, "Replications")->check(CLI::PositiveNumber)->capture_default_str();
  mc_cmd->add_option("--seed", mc.seed, "Random seed")->capture_default_str();
  mc_cmd->add_option("--refine", mc.refine, "Fine steps per output step (gamma)")->check(CLI::PositiveNumber)->capture_default_str();
  mc_cmd->add_option("--t", mc.t, "Evaluation time")->check(CLI::NonNegativeNumber)->capture_default_str();
  mc_cmd->add_option("--threads", mc.threads, "Worker cap (default CMA_KERNEL_THREADS)")->capture_default_str();
  mc_cmd->add_option("--compare", mc.compare, "Compare at the grid point or at t")
      ->check(CLI::IsMember({"grid", "nominal"}))
      ->capture_default_str();
  mc_cmd->add_option("--out", mc.out, "Per-replication CSV")->capture_default_str();
  mc_cmd->add_option("--summary", mc.summary, "Summary JSON (default <out>.json)");
  add_estimator_options(mc_cmd, mc.estimator);
  mc_cmd->get_option("--tmax")->default_str("t");

  try {
    std::vector<std::string> expanded = expand_config(args, app);
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
    if (mc_cmd->count("--tmax")) mc.t_max = mc.estimator.t_max;

    json summary;
    if (*simulate) {
      summary = run_simulate(sim);
    } else if (*estimate) {
      summary = run_estimate(est);
    } else if (*asymptotics) {
      if (*c_alpha_cmd) summary = run_c_alpha(asy, out);
      if (*s_cmd) summary = run_s_p_alpha(asy, out);
      if (*sigma_cmd) summary = run_sigma2(asy, out);
      if (*xi_cmd) summary = run_xi(asy, out);
    } else if (*spectrum) {
      summary = run_spectrum(spec);
    } else if (*mc_cmd) {
      summary = run_mc_study(mc);
    }
    if (!summary.is_null()) out << summary.dump(2) << '\n';
    return 0;
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, "ConfigError", e.what(), 2);
  } catch (const Error& e) {
    return report_error(err, std::string(to_string(e.code())), e.what(), exit_status(e.code()));
  } catch (const std::exception& e) {
    return report_error(err, "InternalError", e.what(), 1);
  }
}

}  // namespace cmak::cli
