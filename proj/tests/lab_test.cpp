#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pu/lab.h"

using namespace pu;

namespace {

const GaussianTask kTask = GaussianTask::default_1d();
const Model kUnitScorer = make_linear_model({1.0}, 0.0);
const LossSpec kSigmoid = loss_spec(LossKind::sigmoid);

}  // namespace

TEST_CASE("replications are deterministic and estimator dominance is exact") {
  const ReplicationDraws a = run_replications(kTask, kUnitScorer, kSigmoid, 5, 50, 500, 11);
  const ReplicationDraws b = run_replications(kTask, kUnitScorer, kSigmoid, 5, 50, 500, 11);
  CHECK(a.upu == b.upu);
  CHECK(a.nnpu == b.nnpu);
  CHECK(a.d_minus_count == b.d_minus_count);
  CHECK(a.d_minus_count > 0);  // small n_p makes negative terms common

  std::size_t differs = 0;
  for (std::size_t r = 0; r < a.upu.size(); ++r) {
    CHECK(a.nnpu[r] >= a.upu[r]);
    CHECK(a.nnpu[r] >= 0.0);
    differs += a.nnpu[r] > a.upu[r] ? 1 : 0;
    CHECK_FALSE(a.nnpu[r] < a.upu[r]);
  }
  // the estimators differ exactly on the D- replications
  CHECK(differs == a.d_minus_count);
}

TEST_CASE("replicate aggregates against the oracle") {
  const EstimatorStats s = replicate(kTask, kUnitScorer, kSigmoid, 50, 500, 2000, 21);
  CHECK(s.replications == 2000);
  CHECK(std::fabs(s.bias_upu) <= 4.0 * s.stderr_upu);
  CHECK(s.mean_nnpu >= s.mean_upu);
  CHECK(s.pr_d_minus == doctest::Approx(static_cast<double>(s.d_minus_count) / 2000.0));
  CHECK(s.mse_upu > 0.0);

  CHECK_THROWS_AS((void)replicate(kTask, kUnitScorer, kSigmoid, 50, 500, 99, 21),
                  std::invalid_argument);
}

TEST_CASE("wilson interval sanity") {
  const WilsonInterval zero = wilson_interval(0, 1000);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi < 0.02);
  const WilsonInterval full = wilson_interval(1000, 1000);
  CHECK(full.hi == 1.0);
  const WilsonInterval mid = wilson_interval(500, 1000);
  CHECK(mid.lo < 0.5);
  CHECK(mid.hi > 0.5);
  CHECK(wilson_interval(0, 0).hi == 1.0);
}

TEST_CASE("mse comparison under the documented conditions") {
  // sharp near-Bayes classifier, tiny P sample, n_u = 100 * n_p
  const Model sharp = make_linear_model({10.0}, 0.0);
  const std::vector<double> betas = {0.05 * 0.5, 0.1 * 0.5, 0.2 * 0.5};
  const MseReport report = mse_comparison(kTask, sharp, kSigmoid, 5, 500, 4000, 31, betas);
  CHECK(report.any_d_minus);
  CHECK(report.nu_np_factor == doctest::Approx(100.0));
  CHECK(report.mse_diff > 0.0);
  CHECK(report.mse_diff > 2.0 * report.paired_stderr);
  REQUIRE(report.mse_bound_rows.size() == 3);
  for (const MseBoundRow& row : report.mse_bound_rows) {
    CHECK(row.rhs == doctest::Approx(3.0 * row.beta * row.beta * row.pr_exceed));
    CHECK(row.holds);
  }

  CHECK_THROWS_AS(
      (void)mse_comparison(kTask, sharp, loss_spec(LossKind::logistic), 5, 500, 500, 31, betas),
      std::invalid_argument);
}

TEST_CASE("mse comparison flags a configuration without D- events") {
  // large samples at a well-separated classifier: negative terms never occur
  const MseReport report = mse_comparison(kTask, kUnitScorer, kSigmoid, 200, 20000, 200, 41, {0.01});
  CHECK_FALSE(report.any_d_minus);
  CHECK(report.mse_diff == 0.0);
  CHECK(report.stats.pr_d_minus == 0.0);
}

TEST_CASE("consistency sweep shapes and trends") {
  const std::vector<std::pair<std::size_t, std::size_t>> grid = {{1, 100}, {10, 1000}, {100, 10000}};
  const auto rows = consistency_sweep(kTask, kUnitScorer, kSigmoid, grid, 1500, 51);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n_p == grid[i].first);
    CHECK(rows[i].n_u == grid[i].second);
    CHECK(std::fabs(rows[i].bias_upu) <= 4.0 * rows[i].stderr_upu);
  }
  // bias and Pr(D-) shrink with sample size (allowing statistical slack)
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double slack = 2.0 * std::sqrt(rows[i - 1].stderr_nnpu * rows[i - 1].stderr_nnpu +
                                         rows[i].stderr_nnpu * rows[i].stderr_nnpu);
    CHECK(rows[i].bias_nnpu <= rows[i - 1].bias_nnpu + slack);
    CHECK(wilson_interval(rows[i].d_minus_count, rows[i].replications).lo <=
          wilson_interval(rows[i - 1].d_minus_count, rows[i - 1].replications).hi);
  }

  CHECK_THROWS_AS((void)consistency_sweep(kTask, kUnitScorer, kSigmoid, {{10, 100}, {5, 50}}, 150, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)consistency_sweep(kTask, kUnitScorer, kSigmoid, {}, 150, 1),
                  std::invalid_argument);
}

TEST_CASE("lab rejects non-linear classifiers") {
  const Model mlp = init_parameters(Architecture::parse("1-4-1:relu"), 3);
  CHECK_THROWS_AS((void)run_replications(kTask, mlp, kSigmoid, 5, 50, 200, 1),
                  std::invalid_argument);
}
