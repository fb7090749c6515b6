#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pu/data.h"
#include "pu/loss.h"
#include "pu/model.h"
#include "pu/parallel.h"

namespace pu {

// Replication summary for both estimators at a fixed classifier.
struct EstimatorStats {
  std::size_t replications = 0;
  std::size_t n_p = 0;
  std::size_t n_u = 0;
  double oracle_risk = 0.0;
  double mean_upu = 0.0;
  double mean_nnpu = 0.0;
  double bias_upu = 0.0;
  double bias_nnpu = 0.0;
  double mse_upu = 0.0;
  double mse_nnpu = 0.0;
  double stderr_upu = 0.0;
  double stderr_nnpu = 0.0;
  double pr_d_minus = 0.0;
  std::size_t d_minus_count = 0;
};

// Wilson score interval for a binomial proportion.
struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 4.0);

// Per-replication estimator values; replication r is drawn with seed
// base_seed + r, so the set is reproducible and embarrassingly parallel.
struct ReplicationDraws {
  std::vector<double> upu;
  std::vector<double> nnpu;
  std::size_t d_minus_count = 0;
};

ReplicationDraws run_replications(const GaussianTask& task, const Model& linear_g,
                                  const LossSpec& loss, std::size_t n_p, std::size_t n_u,
                                  std::size_t replications, std::uint64_t base_seed,
                                  Exec ex = Exec::parallel);

// Resamples (P, U) `replications` times at fixed g and aggregates bias, MSE
// and Pr(D-) against the quadrature/closed-form oracle.
EstimatorStats replicate(const GaussianTask& task, const Model& linear_g, const LossSpec& loss,
                         std::size_t n_p, std::size_t n_u, std::size_t replications,
                         std::uint64_t base_seed, Exec ex = Exec::parallel);

struct MseBoundRow {
  double beta = 0.0;
  double pr_exceed = 0.0;  // empirical Pr{nnpu - upu > beta}
  double rhs = 0.0;        // 3 beta^2 pr_exceed
  bool holds = false;      // mse_diff >= rhs
};

struct MseReport {
  EstimatorStats stats;
  double mse_diff = 0.0;  // mse_upu - mse_nnpu (paired)
  double paired_stderr = 0.0;
  std::vector<MseBoundRow> mse_bound_rows;
  bool any_d_minus = false;
  double nu_np_factor = 0.0;
};

// Paired MSE comparison of the two estimators; requires a symmetric loss.
// A run that produces no D- event is flagged, never silently passed.
MseReport mse_comparison(const GaussianTask& task, const Model& linear_g, const LossSpec& loss,
                         std::size_t n_p, std::size_t n_u, std::size_t replications,
                         std::uint64_t base_seed, const std::vector<double>& beta_grid,
                         Exec ex = Exec::parallel);

// One EstimatorStats row per (n_p, n_u) grid point; the grid must be
// nondecreasing in both coordinates.
std::vector<EstimatorStats> consistency_sweep(const GaussianTask& task, const Model& linear_g,
                                              const LossSpec& loss,
                                              const std::vector<std::pair<std::size_t, std::size_t>>& size_grid,
                                              std::size_t replications, std::uint64_t base_seed,
                                              Exec ex = Exec::parallel);

}  // namespace pu
