#pragma once

#include <optional>
#include <span>
#include <string>

#include "pu/loss.h"
#include "pu/matrix.h"
#include "pu/model.h"

namespace pu {

// The three partial empirical risks a PU sample supports, plus the N-side
// partial when fully labeled data is available.
struct RiskBreakdown {
  double r_p_plus = 0.0;   // mean l(+g) over P
  double r_p_minus = 0.0;  // mean l(-g) over P
  double r_u_minus = 0.0;  // mean l(-g) over U
  std::optional<double> r_n_minus;  // mean l(-g) over N (PN mode only)
  double pi_p = 0.5;
  std::size_t n_p = 0;
  std::size_t n_u = 0;
  std::size_t n_n = 0;
};

// Deterministic (pairwise-summed) partial risks from raw scores.
RiskBreakdown breakdown_from_scores(const LossSpec& loss, std::span<const double> p_scores,
                                    std::span<const double> u_scores, double pi_p,
                                    Exec ex = Exec::parallel);

// Adds the N-side partial risk to an existing breakdown.
void attach_n_scores(RiskBreakdown& b, const LossSpec& loss, std::span<const double> n_scores,
                     Exec ex = Exec::parallel);

// pi_p * Rp+ + pi_n * Rn-; requires the N partial.
double pn_risk(const RiskBreakdown& b);

// pi_p * Rp+ - pi_p * Rp- + Ru-; may be negative.
double upu_risk(const RiskBreakdown& b);

// pi_p * Rp+ + max{0, Ru- - pi_p * Rp-}; >= 0 and >= upu_risk.
double nnpu_risk(const RiskBreakdown& b);

enum class Branch { normal, defect };

struct RiskGradient {
  GradientBuffer grad;
  Branch branch = Branch::normal;
  double discount = 1.0;
  double r_batch = 0.0;  // Ru-(batch) - pi_p * Rp-(batch)
};

// One minibatch step of the stochastic training rule: if the batch's
// negative-class term r >= -beta the gradient is that of the plain PU
// estimator; otherwise the gradient ascends the clipped term and the step
// size is discounted by gamma. beta = +inf disables the defect branch
// entirely (plain PU training). The model's l2 term is added exactly once.
RiskGradient risk_gradient(const Model& model, const LossSpec& loss, const RowBatch& p_batch,
                           const RowBatch& u_batch, double pi_p, double beta, double gamma,
                           Exec ex = Exec::parallel);

// Gradient of the PN estimator (pi_p * Rp+ + pi_n * Rn-) on a labeled batch.
GradientBuffer pn_gradient(const Model& model, const LossSpec& loss, const RowBatch& p_batch,
                           const RowBatch& n_batch, double pi_p, Exec ex = Exec::parallel);

enum class EstimatorKind { pn, upu, nnpu };

EstimatorKind parse_estimator_kind(const std::string& name);
std::string to_string(EstimatorKind kind);

// True (sub)gradient of the selected estimator on a full batch. Unlike
// risk_gradient's defect branch, the clipped nnpu estimator contributes no
// gradient through an inactive max. For pn the second batch holds N data.
GradientBuffer estimator_gradient(const Model& model, const LossSpec& loss, EstimatorKind kind,
                                  const RowBatch& p_batch, const RowBatch& second_batch,
                                  double pi_p, Exec ex = Exec::parallel);

// CSV serialization of a breakdown (columns are part of the file contract).
std::string breakdown_csv_header();
std::string breakdown_csv_row(const RiskBreakdown& b);

}  // namespace pu
