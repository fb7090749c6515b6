#include "pu/risk.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "pu/parallel.h"

namespace pu {

namespace {

void check_pi(double pi_p) {
  if (!(pi_p > 0.0 && pi_p < 1.0)) throw std::invalid_argument("class prior must lie in (0,1)");
}

// mean of l(sign * s) over scores, fixed reduction tree
double mean_loss(const LossSpec& loss, std::span<const double> scores, double sign, Exec ex) {
  std::vector<double> terms(scores.size());
  par::for_each_index(ex, scores.size(),
                      [&](std::size_t i) { terms[i] = loss_value(loss, sign * scores[i]); });
  return par::pairwise_sum(terms) / static_cast<double>(scores.size());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

RiskBreakdown breakdown_from_scores(const LossSpec& loss, std::span<const double> p_scores,
                                    std::span<const double> u_scores, double pi_p, Exec ex) {
  check_pi(pi_p);
  if (p_scores.empty()) throw std::invalid_argument("breakdown: P sample is empty");
  RiskBreakdown b;
  b.pi_p = pi_p;
  b.n_p = p_scores.size();
  b.n_u = u_scores.size();
  b.r_p_plus = mean_loss(loss, p_scores, +1.0, ex);
  b.r_p_minus = mean_loss(loss, p_scores, -1.0, ex);
  b.r_u_minus = u_scores.empty() ? 0.0 : mean_loss(loss, u_scores, -1.0, ex);
  return b;
}

void attach_n_scores(RiskBreakdown& b, const LossSpec& loss, std::span<const double> n_scores,
                     Exec ex) {
  if (n_scores.empty()) throw std::invalid_argument("breakdown: N sample is empty");
  b.n_n = n_scores.size();
  b.r_n_minus = mean_loss(loss, n_scores, -1.0, ex);
}

double pn_risk(const RiskBreakdown& b) {
  if (!b.r_n_minus) throw std::invalid_argument("pn_risk: breakdown carries no N partial risk");
  return b.pi_p * b.r_p_plus + (1.0 - b.pi_p) * *b.r_n_minus;
}

double upu_risk(const RiskBreakdown& b) {
  if (b.n_p == 0 || b.n_u == 0) throw std::invalid_argument("upu_risk: needs P and U samples");
  // grouped as pi_p*Rp+ + (Ru- - pi_p*Rp-) so that upu and nnpu are
  // bitwise identical whenever the negative-class term is nonnegative
  return b.pi_p * b.r_p_plus + (b.r_u_minus - b.pi_p * b.r_p_minus);
}

double nnpu_risk(const RiskBreakdown& b) {
  if (b.n_p == 0 || b.n_u == 0) throw std::invalid_argument("nnpu_risk: needs P and U samples");
  return b.pi_p * b.r_p_plus + std::max(0.0, b.r_u_minus - b.pi_p * b.r_p_minus);
}

namespace {

// upstream weights for one backward call: w[i] = coeff * l'(sign * s[i])
std::vector<double> loss_upstream(const LossSpec& loss, std::span<const double> scores, double sign,
                                  double coeff, Exec ex) {
  std::vector<double> w(scores.size());
  par::for_each_index(ex, scores.size(), [&](std::size_t i) {
    // d/ds l(sign*s) = sign * l'(sign*s)
    w[i] = coeff * sign * loss_derivative(loss, sign * scores[i]);
  });
  return w;
}

void add_into(GradientBuffer& acc, const GradientBuffer& g) {
  for (std::size_t j = 0; j < acc.values.size(); ++j) acc.values[j] += g.values[j];
}

}  // namespace

RiskGradient risk_gradient(const Model& model, const LossSpec& loss, const RowBatch& p_batch,
                           const RowBatch& u_batch, double pi_p, double beta, double gamma,
                           Exec ex) {
  check_pi(pi_p);
  if (p_batch.size() == 0 || u_batch.size() == 0)
    throw std::invalid_argument("risk_gradient: empty minibatch");
  if (!(beta >= 0.0)) throw std::invalid_argument("risk_gradient: beta must be >= 0");
  if (loss.bounded() && std::isfinite(beta) && beta > pi_p * loss.sup_value + 1e-15)
    throw std::invalid_argument("risk_gradient: beta exceeds pi_p * sup l for a bounded loss");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("risk_gradient: gamma outside [0,1]");

  const double np = static_cast<double>(p_batch.size());
  const double nu = static_cast<double>(u_batch.size());

  ForwardTrace p_trace, u_trace;
  const std::vector<double> p_scores = forward(model, p_batch, ex, &p_trace);
  const std::vector<double> u_scores = forward(model, u_batch, ex, &u_trace);

  const double r_p_minus = mean_loss(loss, p_scores, -1.0, ex);
  const double r_u_minus = mean_loss(loss, u_scores, -1.0, ex);
  const double r = r_u_minus - pi_p * r_p_minus;

  RiskGradient out;
  out.r_batch = r;

  if (r >= -beta) {
    out.branch = Branch::normal;
    out.discount = 1.0;
    // one backward per partial risk: pi_p*Rp+, -pi_p*Rp-, +Ru-
    GradientBuffer g = backward(model, p_batch, p_trace,
                                loss_upstream(loss, p_scores, +1.0, pi_p / np, ex), ex, false);
    add_into(g, backward(model, p_batch, p_trace,
                         loss_upstream(loss, p_scores, -1.0, -pi_p / np, ex), ex, false));
    add_into(g, backward(model, u_batch, u_trace,
                         loss_upstream(loss, u_scores, -1.0, 1.0 / nu, ex), ex, false));
    out.grad = std::move(g);
  } else {
    out.branch = Branch::defect;
    out.discount = gamma;
    // gradient of pi_p*Rp- - Ru-, i.e. ascend the clipped term
    GradientBuffer g = backward(model, p_batch, p_trace,
                                loss_upstream(loss, p_scores, -1.0, pi_p / np, ex), ex, false);
    add_into(g, backward(model, u_batch, u_trace,
                         loss_upstream(loss, u_scores, -1.0, -1.0 / nu, ex), ex, false));
    out.grad = std::move(g);
  }
  if (model.l2_coefficient > 0.0) add_l2_gradient(model, model.l2_coefficient, out.grad);
  return out;
}

GradientBuffer pn_gradient(const Model& model, const LossSpec& loss, const RowBatch& p_batch,
                           const RowBatch& n_batch, double pi_p, Exec ex) {
  check_pi(pi_p);
  if (p_batch.size() == 0 || n_batch.size() == 0)
    throw std::invalid_argument("pn_gradient: empty minibatch");
  const double np = static_cast<double>(p_batch.size());
  const double nn = static_cast<double>(n_batch.size());

  ForwardTrace p_trace, n_trace;
  const std::vector<double> p_scores = forward(model, p_batch, ex, &p_trace);
  const std::vector<double> n_scores = forward(model, n_batch, ex, &n_trace);

  GradientBuffer g = backward(model, p_batch, p_trace,
                              loss_upstream(loss, p_scores, +1.0, pi_p / np, ex), ex, false);
  add_into(g, backward(model, n_batch, n_trace,
                       loss_upstream(loss, n_scores, -1.0, (1.0 - pi_p) / nn, ex), ex, false));
  if (model.l2_coefficient > 0.0) add_l2_gradient(model, model.l2_coefficient, g);
  return g;
}

EstimatorKind parse_estimator_kind(const std::string& name) {
  if (name == "pn") return EstimatorKind::pn;
  if (name == "upu") return EstimatorKind::upu;
  if (name == "nnpu") return EstimatorKind::nnpu;
  throw std::invalid_argument("unknown method: " + name);
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::pn: return "pn";
    case EstimatorKind::upu: return "upu";
    case EstimatorKind::nnpu: return "nnpu";
  }
  return "?";
}

GradientBuffer estimator_gradient(const Model& model, const LossSpec& loss, EstimatorKind kind,
                                  const RowBatch& p_batch, const RowBatch& second_batch,
                                  double pi_p, Exec ex) {
  if (kind == EstimatorKind::pn) return pn_gradient(model, loss, p_batch, second_batch, pi_p, ex);

  check_pi(pi_p);
  if (p_batch.size() == 0 || second_batch.size() == 0)
    throw std::invalid_argument("estimator_gradient: empty batch");
  const double np = static_cast<double>(p_batch.size());
  const double nu = static_cast<double>(second_batch.size());

  ForwardTrace p_trace, u_trace;
  const std::vector<double> p_scores = forward(model, p_batch, ex, &p_trace);
  const std::vector<double> u_scores = forward(model, second_batch, ex, &u_trace);

  GradientBuffer g = backward(model, p_batch, p_trace,
                              loss_upstream(loss, p_scores, +1.0, pi_p / np, ex), ex, false);
  bool clipped = false;
  if (kind == EstimatorKind::nnpu) {
    const double r = mean_loss(loss, u_scores, -1.0, ex) - pi_p * mean_loss(loss, p_scores, -1.0, ex);
    clipped = r < 0.0;  // ties route to the unclipped side
  }
  if (!clipped) {
    add_into(g, backward(model, p_batch, p_trace,
                         loss_upstream(loss, p_scores, -1.0, -pi_p / np, ex), ex, false));
    add_into(g, backward(model, second_batch, u_trace,
                         loss_upstream(loss, u_scores, -1.0, 1.0 / nu, ex), ex, false));
  }
  if (model.l2_coefficient > 0.0) add_l2_gradient(model, model.l2_coefficient, g);
  return g;
}

std::string breakdown_csv_header() {
  return "r_p_plus,r_p_minus,r_u_minus,r_n_minus,pi_p,n_p,n_u,n_n";
}

std::string breakdown_csv_row(const RiskBreakdown& b) {
  std::string row = fmt(b.r_p_plus) + "," + fmt(b.r_p_minus) + "," + fmt(b.r_u_minus) + ",";
  row += b.r_n_minus ? fmt(*b.r_n_minus) : "";
  row += "," + fmt(b.pi_p) + "," + std::to_string(b.n_p) + "," + std::to_string(b.n_u) + "," +
         std::to_string(b.n_n);
  return row;
}

}  // namespace pu
