#pragma once

#include <cstdint>
#include <vector>

#include "pu/data.h"
#include "pu/loss.h"
#include "pu/model.h"
#include "pu/optim.h"
#include "pu/risk.h"

namespace pu {

struct TrainConfig {
  EstimatorKind method = EstimatorKind::nnpu;
  double beta = 0.0;
  double gamma = 1.0;
  std::size_t epochs = 100;
  std::size_t batches_per_epoch = 10;
  LossSpec loss = loss_spec(LossKind::sigmoid);
  LossSpec eval_loss = loss_spec(LossKind::zero_one);
  OptimizerKind optimizer = OptimizerKind::adam;
  double step_size = 0.0;  // 0 -> optimizer default
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double optim_epsilon = 1e-8;
  Architecture arch;
  double l2_coefficient = 5e-3;
  std::uint64_t seed = 1;
  Exec ex = Exec::parallel;

  void validate(const PuDataset& data) const;
};

struct EpochLog {
  std::size_t epoch = 0;           // 1-based
  double train_surrogate = 0.0;    // minimized estimator, surrogate loss, full train data
  double train_eval = 0.0;         // same estimator with eval_loss
  double test_eval = 0.0;          // PN risk with eval_loss on the labeled test set
  double defect_fraction = 0.0;    // minibatches that took the defect branch
};

struct TrainResult {
  Model model;
  std::vector<EpochLog> logs;
  bool aborted_non_finite = false;
};

// One pass of shuffled minibatch updates followed by a full-data evaluation.
EpochLog run_epoch(Model& model, OptimizerState& opt, const PuDataset& data,
                   const TrainConfig& cfg, std::uint64_t epoch_seed, std::size_t epoch_index);

// Runs cfg.epochs epochs; fully deterministic given cfg.seed. A non-finite
// training risk aborts with the last finite model.
TrainResult train(const PuDataset& data, const TrainConfig& cfg);

// PN-mode N sample size from the P sample size: (pi_n / 2 pi_p)^2 * n_p,
// rounded to the nearest integer, at least 1.
std::size_t pn_sample_size(std::size_t n_p, double pi_p);

}  // namespace pu
