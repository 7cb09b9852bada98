#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cmak/estimation.hpp"
#include "cmak/simulation.hpp"

namespace cmak {

/// Worker count: CMA_KERNEL_THREADS when set, else the hardware concurrency, never above `jobs`.
int worker_count(int jobs);

/// Runs job(0..count-1) on a worker pool; each index is executed exactly once.
void parallel_for(int count, const std::function<void(int)>& job, int threads = 0);

struct McStudyConfig {
  /// Simulates one path; the plan handed in carries stream = replication index.
  std::function<SampledSeries(const SimulationPlan&)> simulate;
  SimulationPlan plan;
  KernelEstimateOptions estimator;
  double t_max = 1.0;
  /// Evaluation time t; the estimate is read in cell floor(t / delta).
  double t_eval = 1.0;
  /// True kernel (sigma g for sigma^2 != 1).
  std::function<double(double)> g_true;
  /// Compare against g at the cell's evaluation point (r + h) delta rather than at t_eval.
  bool compare_on_grid = true;
  int replications = 1;
  int threads = 0;
};

struct McReplication {
  int index = 0;
  double g_hat = 0.0;
  /// sqrt(n delta) (g_hat - g).
  double scaled_error = 0.0;
};

struct McSummary {
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double jarque_bera = 0.0;
  /// Chi-square(2) upper tail of the Jarque-Bera statistic.
  double normality_p_value = 0.0;
  /// int_0^t g^2, the limiting variance.
  double limit_variance = 0.0;
};

struct McStudyResult {
  double t_compare = 0.0;
  double g_compare = 0.0;
  std::vector<McReplication> rows;
  /// Present when there are at least two replications.
  std::optional<McSummary> summary;
};

McStudyResult mc_study(const McStudyConfig& config);

}  // namespace cmak
