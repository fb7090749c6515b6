#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "pu/trainer.h"

using namespace pu;

namespace {

PuDataset small_dataset(std::size_t n_p = 30, std::size_t n_u = 300, std::size_t n_n = 0,
                        std::uint64_t seed = 500) {
  SampleCounts counts;
  counts.n_p = n_p;
  counts.n_u = n_u;
  counts.n_test = 400;
  counts.n_n = n_n;
  return sample_task(GaussianTask::default_2d(), counts, seed);
}

TrainConfig base_config(EstimatorKind method) {
  TrainConfig cfg;
  cfg.method = method;
  cfg.epochs = 4;
  cfg.batches_per_epoch = 3;
  cfg.arch = Architecture::parse("2-8-1:relu");
  cfg.step_size = 1e-3;
  cfg.l2_coefficient = 0.0;
  cfg.seed = 9;
  return cfg;
}

}  // namespace

TEST_CASE("training is deterministic per seed and seeds are isolated") {
  const PuDataset data = small_dataset();
  const TrainConfig cfg = base_config(EstimatorKind::nnpu);
  const TrainResult a = train(data, cfg);
  const TrainResult b = train(data, cfg);
  REQUIRE(a.logs.size() == 4);
  CHECK(a.model.params == b.model.params);
  for (std::size_t e = 0; e < a.logs.size(); ++e) {
    CHECK(a.logs[e].train_surrogate == b.logs[e].train_surrogate);
    CHECK(a.logs[e].test_eval == b.logs[e].test_eval);
  }

  TrainConfig other = cfg;
  other.seed = 10;
  const TrainResult c = train(data, other);
  CHECK(c.logs.size() == a.logs.size());
  CHECK(c.model.params != a.model.params);
  for (const EpochLog& log : a.logs) {
    CHECK(log.test_eval >= 0.0);
    CHECK(log.test_eval <= 1.0);
    CHECK(log.defect_fraction >= 0.0);
    CHECK(log.defect_fraction <= 1.0);
  }
}

TEST_CASE("nnpu train risk never goes below zero while upu may") {
  const PuDataset data = small_dataset();
  TrainConfig cfg = base_config(EstimatorKind::nnpu);
  cfg.epochs = 6;
  const TrainResult nn = train(data, cfg);
  for (const EpochLog& log : nn.logs) CHECK(log.train_surrogate >= 0.0);
}

TEST_CASE("upu trainer is bitwise identical to nnpu at maximal beta") {
  const PuDataset data = small_dataset(20, 200);
  TrainConfig upu_cfg = base_config(EstimatorKind::upu);
  TrainConfig nn_cfg = base_config(EstimatorKind::nnpu);
  nn_cfg.beta = data.pi_p_given * loss_spec(LossKind::sigmoid).sup_value;

  const TrainResult u = train(data, upu_cfg);
  const TrainResult n = train(data, nn_cfg);
  CHECK(std::memcmp(u.model.params.data(), n.model.params.data(),
                    u.model.params.size() * sizeof(double)) == 0);
  for (std::size_t e = 0; e < u.logs.size(); ++e) {
    CHECK(u.logs[e].test_eval == n.logs[e].test_eval);
    CHECK(n.logs[e].defect_fraction == 0.0);
  }
}

TEST_CASE("gamma zero freezes parameters on all-defect epochs") {
  // scores: P strongly positive, U strongly negative -> every batch defects
  PuDataset data;
  data.p_points = Matrix(6, 1);
  data.u_points = Matrix(30, 1);
  for (std::size_t i = 0; i < 6; ++i) data.p_points.at(i, 0) = 50.0;
  for (std::size_t i = 0; i < 30; ++i) data.u_points.at(i, 0) = -50.0;
  data.pi_p_true = data.pi_p_given = 0.5;
  data.test_points = Matrix(2, 1);
  data.test_points.at(0, 0) = 50.0;
  data.test_points.at(1, 0) = -50.0;
  data.test_labels = {+1, -1};

  Model model = make_linear_model({1.0}, 0.0);
  model.l2_coefficient = 0.0;
  OptimizerState opt = OptimizerState::make(OptimizerKind::adam, 1e-3, model.params.size());

  TrainConfig cfg;
  cfg.method = EstimatorKind::nnpu;
  cfg.beta = 0.0;
  cfg.gamma = 0.0;
  cfg.batches_per_epoch = 3;
  cfg.arch = model.arch;
  cfg.l2_coefficient = 0.0;

  const auto params_before = model.params;
  const EpochLog log = run_epoch(model, opt, data, cfg, 77, 1);
  CHECK(log.defect_fraction == 1.0);
  CHECK(model.params == params_before);
  CHECK(opt.step_count == 3);
  CHECK(opt.moment1 != std::vector<double>(model.params.size(), 0.0));
}

TEST_CASE("pn training reaches near-oracle test risk on the separable task") {
  SampleCounts counts;
  counts.n_p = 500;
  counts.n_u = 1;  // unused by pn
  counts.n_n = pn_sample_size(500, 0.5);
  counts.n_test = 4000;
  const PuDataset data = sample_task(GaussianTask::default_2d(), counts, 1234);
  CHECK(counts.n_n == 125);

  TrainConfig cfg;
  cfg.method = EstimatorKind::pn;
  cfg.epochs = 50;
  cfg.batches_per_epoch = 10;
  cfg.arch = Architecture::linear(2);
  cfg.step_size = 1e-2;
  cfg.l2_coefficient = 0.0;
  cfg.seed = 3;
  const TrainResult res = train(data, cfg);
  CHECK(res.logs.back().test_eval < 0.05);  // Bayes risk of the task is ~0.02
}

TEST_CASE("non-finite risks abort with the last finite model") {
  const PuDataset data = small_dataset(10, 60);
  TrainConfig cfg = base_config(EstimatorKind::upu);
  cfg.loss = loss_spec(LossKind::squared);
  cfg.optimizer = OptimizerKind::sgd;
  cfg.step_size = 1e12;  // guaranteed blow-up
  cfg.epochs = 5;
  const TrainResult res = train(data, cfg);
  CHECK(res.aborted_non_finite);
  for (double p : res.model.params) CHECK(std::isfinite(p));
  CHECK(res.logs.size() < 5);
}

TEST_CASE("configuration validation") {
  const PuDataset data = small_dataset(10, 60);
  TrainConfig cfg = base_config(EstimatorKind::nnpu);

  TrainConfig bad = cfg;
  bad.batches_per_epoch = 11;  // > n_p
  CHECK_THROWS_WITH_AS((void)train(data, bad), doctest::Contains("P batch"), std::invalid_argument);

  bad = cfg;
  bad.loss = loss_spec(LossKind::zero_one);
  CHECK_THROWS_AS((void)train(data, bad), std::invalid_argument);

  bad = cfg;
  bad.beta = 0.6;  // > pi * sup
  CHECK_THROWS_AS((void)train(data, bad), std::invalid_argument);

  bad = cfg;
  bad.gamma = -0.5;
  CHECK_THROWS_AS((void)train(data, bad), std::invalid_argument);

  bad = cfg;
  bad.method = EstimatorKind::pn;  // dataset has no N sample
  CHECK_THROWS_AS((void)train(data, bad), std::invalid_argument);

  bad = cfg;
  bad.arch = Architecture::linear(3);  // wrong input dim
  CHECK_THROWS_AS((void)train(data, bad), std::invalid_argument);

  PuDataset no_test = data;
  no_test.test_points = Matrix();
  no_test.test_labels.clear();
  CHECK_THROWS_AS((void)train(no_test, cfg), std::invalid_argument);
}

TEST_CASE("uneven sample counts split with the remainder in the last batch") {
  const PuDataset data = small_dataset(7, 65);
  TrainConfig cfg = base_config(EstimatorKind::nnpu);
  cfg.batches_per_epoch = 3;
  const TrainResult res = train(data, cfg);  // would throw on an empty slice
  CHECK(res.logs.size() == cfg.epochs);
}

TEST_CASE("pn sample size formula") {
  CHECK(pn_sample_size(1000, 0.5) == 250);
  CHECK(pn_sample_size(4, 0.5) == 1);
  CHECK(pn_sample_size(640, 0.4) == 360);  // (0.6/0.8)^2 * 640
  CHECK_THROWS_AS((void)pn_sample_size(10, 0.0), std::invalid_argument);
}
