#include "pu/trainer.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pu/rng.h"

namespace pu {

namespace {

constexpr std::uint64_t kInitStream = 0x496e6974;   // model init
constexpr std::uint64_t kEpochStream = 0x45706f63;  // epoch shuffles

std::vector<std::uint32_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  rng.shuffle(idx);
  return idx;
}

// contiguous slice k of `idx` split into n_batches parts, remainder to the last
std::vector<std::uint32_t> batch_slice(const std::vector<std::uint32_t>& idx, std::size_t n_batches,
                                       std::size_t k) {
  const std::size_t base = idx.size() / n_batches;
  const std::size_t lo = k * base;
  const std::size_t hi = (k + 1 == n_batches) ? idx.size() : lo + base;
  return {idx.begin() + lo, idx.begin() + hi};
}

double effective_beta(const TrainConfig& cfg, double pi_p) {
  if (cfg.method == EstimatorKind::upu) {
    // plain PU training: the defect branch never fires; for bounded losses
    // this coincides with beta = pi_p * sup l
    return std::numeric_limits<double>::infinity();
  }
  (void)pi_p;
  return cfg.beta;
}

struct EvalScores {
  std::vector<double> p;
  std::vector<double> second;  // U for pu methods, N for pn
};

EvalScores full_train_scores(const Model& model, const PuDataset& data, const TrainConfig& cfg) {
  EvalScores s;
  s.p = forward(model, RowBatch(data.p_points), cfg.ex);
  if (cfg.method == EstimatorKind::pn)
    s.second = forward(model, RowBatch(data.n_points), cfg.ex);
  else
    s.second = forward(model, RowBatch(data.u_points), cfg.ex);
  return s;
}

double estimator_value(const EvalScores& s, const LossSpec& loss, const TrainConfig& cfg,
                       double pi_p) {
  if (cfg.method == EstimatorKind::pn) {
    RiskBreakdown b = breakdown_from_scores(loss, s.p, {}, pi_p, cfg.ex);
    attach_n_scores(b, loss, s.second, cfg.ex);
    return pn_risk(b);
  }
  const RiskBreakdown b = breakdown_from_scores(loss, s.p, s.second, pi_p, cfg.ex);
  return cfg.method == EstimatorKind::upu ? upu_risk(b) : nnpu_risk(b);
}

double test_pn_risk(const Model& model, const PuDataset& data, const LossSpec& eval_loss,
                    Exec ex) {
  const std::vector<double> scores = forward(model, RowBatch(data.test_points), ex);
  std::vector<double> pos, neg;
  pos.reserve(scores.size());
  neg.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    (data.test_labels[i] > 0 ? pos : neg).push_back(scores[i]);
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("trainer: test set must contain both classes");
  RiskBreakdown b = breakdown_from_scores(eval_loss, pos, {}, data.pi_p_true, ex);
  attach_n_scores(b, eval_loss, neg, ex);
  return pn_risk(b);
}

}  // namespace

void TrainConfig::validate(const PuDataset& data) const {
  arch.validate();
  if (arch.input_dim != data.dim())
    throw std::invalid_argument("trainer: architecture input dimension does not match the data");
  if (epochs == 0 || batches_per_epoch == 0)
    throw std::invalid_argument("trainer: epochs and batches_per_epoch must be positive");
  if (loss.kind == LossKind::zero_one)
    throw std::invalid_argument("trainer: zero_one cannot be minimized, pick a surrogate loss");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("trainer: gamma outside [0,1]");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("trainer: beta must be finite and >= 0");
  if (method == EstimatorKind::nnpu && loss.bounded() &&
      beta > data.pi_p_given * loss.sup_value + 1e-15)
    throw std::invalid_argument("trainer: beta exceeds pi_p * sup l for a bounded loss");

  if (data.p_points.rows == 0) throw std::invalid_argument("trainer: P sample is empty");
  const std::size_t n_second =
      method == EstimatorKind::pn ? data.n_points.rows : data.u_points.rows;
  if (n_second == 0)
    throw std::invalid_argument(method == EstimatorKind::pn ? "trainer: PN mode needs N data"
                                                            : "trainer: U sample is empty");
  if (batches_per_epoch > data.p_points.rows)
    throw std::invalid_argument("trainer: batches_per_epoch exceeds n_p, a P batch would be empty");
  if (batches_per_epoch > n_second)
    throw std::invalid_argument("trainer: batches_per_epoch exceeds the U/N sample size");
  if (data.test_points.rows == 0 || data.test_labels.size() != data.test_points.rows)
    throw std::invalid_argument("trainer: labeled test set required for epoch logs");
}

EpochLog run_epoch(Model& model, OptimizerState& opt, const PuDataset& data,
                   const TrainConfig& cfg, std::uint64_t epoch_seed, std::size_t epoch_index) {
  Rng rng(epoch_seed);
  const Matrix& second_points =
      cfg.method == EstimatorKind::pn ? data.n_points : data.u_points;
  const std::vector<std::uint32_t> p_order = shuffled_indices(data.p_points.rows, rng);
  const std::vector<std::uint32_t> second_order = shuffled_indices(second_points.rows, rng);

  const double pi_train = data.pi_p_given;
  const double beta_eff = effective_beta(cfg, pi_train);
  std::size_t defects = 0;

  for (std::size_t k = 0; k < cfg.batches_per_epoch; ++k) {
    RowBatch p_batch(data.p_points, batch_slice(p_order, cfg.batches_per_epoch, k));
    RowBatch s_batch(second_points, batch_slice(second_order, cfg.batches_per_epoch, k));
    if (cfg.method == EstimatorKind::pn) {
      const GradientBuffer g = pn_gradient(model, cfg.loss, p_batch, s_batch, pi_train, cfg.ex);
      step(opt, model, g, 1.0);
    } else {
      RiskGradient rg =
          risk_gradient(model, cfg.loss, p_batch, s_batch, pi_train, beta_eff, cfg.gamma, cfg.ex);
      step(opt, model, rg.grad, rg.discount);
      defects += rg.branch == Branch::defect ? 1 : 0;
    }
  }

  EpochLog log;
  log.epoch = epoch_index;
  const EvalScores scores = full_train_scores(model, data, cfg);
  log.train_surrogate = estimator_value(scores, cfg.loss, cfg, pi_train);
  log.train_eval = estimator_value(scores, cfg.eval_loss, cfg, pi_train);
  log.test_eval = test_pn_risk(model, data, cfg.eval_loss, cfg.ex);
  log.defect_fraction = static_cast<double>(defects) / static_cast<double>(cfg.batches_per_epoch);
  return log;
}

TrainResult train(const PuDataset& data, const TrainConfig& cfg) {
  cfg.validate(data);

  TrainResult result;
  result.model = init_parameters(cfg.arch, mix_seed(cfg.seed, kInitStream), cfg.l2_coefficient);
  const double step_size =
      cfg.step_size > 0.0 ? cfg.step_size : default_step_size(cfg.optimizer);
  OptimizerState opt = OptimizerState::make(cfg.optimizer, step_size, result.model.params.size());
  opt.beta1 = cfg.adam_beta1;
  opt.beta2 = cfg.adam_beta2;
  opt.epsilon = cfg.optim_epsilon;

  std::vector<double> last_finite_params = result.model.params;
  for (std::size_t e = 1; e <= cfg.epochs; ++e) {
    const std::uint64_t epoch_seed = mix_seed(cfg.seed, kEpochStream + e);
    const EpochLog log = run_epoch(result.model, opt, data, cfg, epoch_seed, e);
    if (!std::isfinite(log.train_surrogate) || !std::isfinite(log.test_eval)) {
      result.model.params = last_finite_params;
      result.aborted_non_finite = true;
      break;
    }
    result.logs.push_back(log);
    last_finite_params = result.model.params;
  }
  return result;
}

std::size_t pn_sample_size(std::size_t n_p, double pi_p) {
  if (!(pi_p > 0.0 && pi_p < 1.0)) throw std::invalid_argument("pn_sample_size: pi_p outside (0,1)");
  const double pi_n = 1.0 - pi_p;
  const double ratio = pi_n / (2.0 * pi_p);
  const double n = std::round(ratio * ratio * static_cast<double>(n_p));
  return static_cast<std::size_t>(std::max(1.0, n));
}

}  // namespace pu
