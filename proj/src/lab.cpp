#include "pu/lab.h"

#include <cmath>
#include <stdexcept>

#include "pu/risk.h"
#include "pu/rng.h"

namespace pu {

namespace {

struct LinearCoeffs {
  std::vector<double> w;
  double b;
};

LinearCoeffs fixed_linear(const Model& model, std::size_t d) {
  if (model.arch.depth() != 1)
    throw std::invalid_argument("lab: the fixed classifier must be a linear model");
  if (model.arch.input_dim != d)
    throw std::invalid_argument("lab: classifier dimension does not match the task");
  LinearCoeffs c;
  c.w.assign(model.params.begin(), model.params.begin() + d);
  c.b = model.params[d];
  return c;
}

double mean_of(std::span<const double> xs) {
  return par::pairwise_sum(xs) / static_cast<double>(xs.size());
}

// sqrt(sample variance / n): standard error of the mean
double stderr_of(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - mean;
    sq[i] = d * d;
  }
  const double var = par::pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ReplicationDraws run_replications(const GaussianTask& task, const Model& linear_g,
                                  const LossSpec& loss, std::size_t n_p, std::size_t n_u,
                                  std::size_t replications, std::uint64_t base_seed, Exec ex) {
  task.validate();
  if (n_p == 0 || n_u == 0) throw std::invalid_argument("lab: n_p and n_u must be >= 1");
  const LinearCoeffs g = fixed_linear(linear_g, task.d);

  ReplicationDraws out;
  out.upu.assign(replications, 0.0);
  out.nnpu.assign(replications, 0.0);
  std::vector<std::uint8_t> d_minus(replications, 0);

  par::for_each_index(ex, replications, [&](std::size_t r) {
    Rng rng(base_seed + r);
    auto score = [&](const std::vector<double>& mean) {
      double s = g.b;
      for (std::size_t j = 0; j < task.d; ++j) s += g.w[j] * rng.normal(mean[j], task.sigma);
      return s;
    };
    std::vector<double> p_scores(n_p), u_scores(n_u);
    for (std::size_t i = 0; i < n_p; ++i) p_scores[i] = score(task.mean_p);
    for (std::size_t i = 0; i < n_u; ++i)
      u_scores[i] = score(rng.bernoulli(task.pi_p) ? task.mean_p : task.mean_n);

    const RiskBreakdown b = breakdown_from_scores(loss, p_scores, u_scores, task.pi_p, Exec::serial);
    out.upu[r] = upu_risk(b);
    out.nnpu[r] = nnpu_risk(b);
    d_minus[r] = (b.r_u_minus - task.pi_p * b.r_p_minus) < 0.0 ? 1 : 0;
  });

  for (std::uint8_t f : d_minus) out.d_minus_count += f;
  return out;
}

namespace {

EstimatorStats stats_from_draws(const ReplicationDraws& draws, double oracle, std::size_t n_p,
                                std::size_t n_u) {
  EstimatorStats s;
  s.replications = draws.upu.size();
  s.n_p = n_p;
  s.n_u = n_u;
  s.oracle_risk = oracle;
  s.mean_upu = mean_of(draws.upu);
  s.mean_nnpu = mean_of(draws.nnpu);
  s.bias_upu = s.mean_upu - oracle;
  s.bias_nnpu = s.mean_nnpu - oracle;

  std::vector<double> sq(draws.upu.size());
  for (std::size_t r = 0; r < draws.upu.size(); ++r) {
    const double d = draws.upu[r] - oracle;
    sq[r] = d * d;
  }
  s.mse_upu = mean_of(sq);
  for (std::size_t r = 0; r < draws.nnpu.size(); ++r) {
    const double d = draws.nnpu[r] - oracle;
    sq[r] = d * d;
  }
  s.mse_nnpu = mean_of(sq);

  s.stderr_upu = stderr_of(draws.upu, s.mean_upu);
  s.stderr_nnpu = stderr_of(draws.nnpu, s.mean_nnpu);
  s.d_minus_count = draws.d_minus_count;
  s.pr_d_minus = static_cast<double>(draws.d_minus_count) / static_cast<double>(s.replications);
  return s;
}

}  // namespace

EstimatorStats replicate(const GaussianTask& task, const Model& linear_g, const LossSpec& loss,
                         std::size_t n_p, std::size_t n_u, std::size_t replications,
                         std::uint64_t base_seed, Exec ex) {
  if (replications < 100) throw std::invalid_argument("replicate: need at least 100 replications");
  const double oracle = oracle_risk(task, linear_g, loss);
  const ReplicationDraws draws =
      run_replications(task, linear_g, loss, n_p, n_u, replications, base_seed, ex);
  return stats_from_draws(draws, oracle, n_p, n_u);
}

MseReport mse_comparison(const GaussianTask& task, const Model& linear_g, const LossSpec& loss,
                         std::size_t n_p, std::size_t n_u, std::size_t replications,
                         std::uint64_t base_seed, const std::vector<double>& beta_grid, Exec ex) {
  if (!loss.is_symmetric)
    throw std::invalid_argument("mse_comparison: requires a symmetric loss");
  if (replications < 100) throw std::invalid_argument("mse_comparison: need at least 100 replications");

  const double oracle = oracle_risk(task, linear_g, loss);
  const ReplicationDraws draws =
      run_replications(task, linear_g, loss, n_p, n_u, replications, base_seed, ex);

  MseReport report;
  report.stats = stats_from_draws(draws, oracle, n_p, n_u);
  report.any_d_minus = draws.d_minus_count > 0;
  report.nu_np_factor = static_cast<double>(n_u) / static_cast<double>(n_p);

  // paired per-replication difference of squared errors
  std::vector<double> diff(replications);
  for (std::size_t r = 0; r < replications; ++r) {
    const double eu = draws.upu[r] - oracle;
    const double en = draws.nnpu[r] - oracle;
    diff[r] = eu * eu - en * en;
  }
  report.mse_diff = mean_of(diff);
  report.paired_stderr = stderr_of(diff, report.mse_diff);

  for (double beta : beta_grid) {
    MseBoundRow row;
    row.beta = beta;
    std::size_t exceed = 0;
    for (std::size_t r = 0; r < replications; ++r)
      exceed += (draws.nnpu[r] - draws.upu[r] > beta) ? 1 : 0;
    row.pr_exceed = static_cast<double>(exceed) / static_cast<double>(replications);
    row.rhs = 3.0 * beta * beta * row.pr_exceed;
    row.holds = report.mse_diff >= row.rhs;
    report.mse_bound_rows.push_back(row);
  }
  return report;
}

std::vector<EstimatorStats> consistency_sweep(
    const GaussianTask& task, const Model& linear_g, const LossSpec& loss,
    const std::vector<std::pair<std::size_t, std::size_t>>& size_grid, std::size_t replications,
    std::uint64_t base_seed, Exec ex) {
  if (size_grid.empty()) throw std::invalid_argument("consistency_sweep: empty size grid");
  for (std::size_t i = 1; i < size_grid.size(); ++i) {
    if (size_grid[i].first < size_grid[i - 1].first || size_grid[i].second < size_grid[i - 1].second)
      throw std::invalid_argument("consistency_sweep: size grid must be nondecreasing");
  }
  const double oracle = oracle_risk(task, linear_g, loss);
  std::vector<EstimatorStats> rows;
  rows.reserve(size_grid.size());
  for (const auto& [n_p, n_u] : size_grid) {
    const ReplicationDraws draws =
        run_replications(task, linear_g, loss, n_p, n_u, replications, base_seed, ex);
    rows.push_back(stats_from_draws(draws, oracle, n_p, n_u));
  }
  return rows;
}

}  // namespace pu
