#include "cmak/studies.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "cmak/error.hpp"
#include "cmak/quadrature.hpp"

namespace cmak {

int worker_count(int jobs) {
  int threads = int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("CMA_KERNEL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) threads = int(cap);
  }
  return std::max(1, std::min(threads, jobs));
}

void parallel_for(int count, const std::function<void(int)>& job, int threads) {
  if (count <= 0) return;
  const int workers = threads > 0 ? std::min(threads, count) : worker_count(count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

McStudyResult mc_study(const McStudyConfig& config) {
  require(config.replications >= 1, ErrorCode::InvalidArgument, "need at least one replication");
  require(static_cast<bool>(config.simulate) && static_cast<bool>(config.g_true), ErrorCode::InvalidArgument,
          "study needs a simulator and a reference kernel");
  const double delta = config.plan.out_delta;
  const Eigen::Index cell = Eigen::Index(std::floor(config.t_eval / delta + 1e-9));
  require(config.t_max >= config.t_eval, ErrorCode::InvalidArgument, "t_max must cover t_eval");

  McStudyResult result;
  result.t_compare = config.compare_on_grid ? (double(cell) + config.estimator.offset_h) * delta : config.t_eval;
  result.g_compare = config.g_true(result.t_compare);
  const double root_n_delta = std::sqrt(double(config.plan.n_out) * delta);

  result.rows.resize(config.replications);
  parallel_for(
      config.replications,
      [&](int rep) {
        SimulationPlan plan = config.plan;
        plan.stream = std::uint64_t(rep);
        const SampledSeries series = config.simulate(plan);
        const KernelEstimate est = estimate_kernel(series, config.t_max, config.estimator);
        McReplication row;
        row.index = rep;
        row.g_hat = est.g_hat(cell);
        row.scaled_error = root_n_delta * (row.g_hat - result.g_compare);
        result.rows[rep] = row;
      },
      config.threads);

  if (config.replications < 2) return result;
  const Eigen::Index r = config.replications;
  Eigen::VectorXd e(r);
  for (Eigen::Index i = 0; i < r; ++i) e(i) = result.rows[i].scaled_error;
  McSummary s;
  s.mean = e.mean();
  const Eigen::VectorXd c = e.array() - s.mean;
  const double m2 = c.squaredNorm() / double(r);
  const double m3 = c.array().cube().sum() / double(r);
  const double m4 = c.array().square().square().sum() / double(r);
  s.variance = c.squaredNorm() / double(r - 1);
  s.std_error = std::sqrt(s.variance / double(r));
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  s.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  s.jarque_bera = double(r) / 6.0 * (s.skewness * s.skewness + 0.25 * s.excess_kurtosis * s.excess_kurtosis);
  s.normality_p_value = std::exp(-0.5 * s.jarque_bera);
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 1e-10;
  cfg.throw_on_failure = false;
  s.limit_variance = integrate(
                         [&](double u) {
                           const double g = config.g_true(u);
                           return g * g;
                         },
                         0.0, result.t_compare, cfg)
                         .value;
  result.summary = s;
  return result;
}

}  // namespace cmak
