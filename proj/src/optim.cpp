#include "pu/optim.h"

#include <cmath>
#include <stdexcept>

namespace pu {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  if (name == "adagrad") return OptimizerKind::adagrad;
  throw std::invalid_argument("unknown optimizer: " + name);
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adagrad: return "adagrad";
  }
  return "?";
}

double default_step_size(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd: return 1e-2;
    case OptimizerKind::adam: return 1e-4;
    case OptimizerKind::adagrad: return 1e-2;
  }
  return 1e-2;
}

OptimizerState OptimizerState::make(OptimizerKind kind, double step_size, std::size_t n_params) {
  if (step_size <= 0.0) throw std::invalid_argument("optimizer: step size must be positive");
  OptimizerState s;
  s.kind = kind;
  s.base_step_size = step_size;
  if (kind == OptimizerKind::adam) {
    s.moment1.assign(n_params, 0.0);
    s.moment2.assign(n_params, 0.0);
  } else if (kind == OptimizerKind::adagrad) {
    s.accumulator.assign(n_params, 0.0);
  }
  return s;
}

void step(OptimizerState& state, Model& model, const GradientBuffer& grad, double discount) {
  const std::size_t n = model.params.size();
  if (grad.values.size() != n) throw std::invalid_argument("optimizer: gradient length mismatch");
  if (discount < 0.0 || discount > 1.0) throw std::invalid_argument("optimizer: discount outside [0,1]");
  for (double g : grad.values) {
    if (!std::isfinite(g)) throw std::runtime_error("optimizer: non-finite gradient entry");
  }

  // eta computed first so that (discount, eta) and (1, discount*eta) take
  // identical rounding paths
  const double eta = discount * state.base_step_size;

  switch (state.kind) {
    case OptimizerKind::sgd: {
      for (std::size_t j = 0; j < n; ++j) model.params[j] -= eta * grad.values[j];
      break;
    }
    case OptimizerKind::adam: {
      if (state.moment1.size() != n || state.moment2.size() != n)
        throw std::invalid_argument("optimizer: adam state length mismatch");
      const double t = static_cast<double>(state.step_count + 1);
      const double c1 = 1.0 - std::pow(state.beta1, t);
      const double c2 = 1.0 - std::pow(state.beta2, t);
      for (std::size_t j = 0; j < n; ++j) {
        const double g = grad.values[j];
        state.moment1[j] = state.beta1 * state.moment1[j] + (1.0 - state.beta1) * g;
        state.moment2[j] = state.beta2 * state.moment2[j] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.moment1[j] / c1;
        const double v_hat = state.moment2[j] / c2;
        model.params[j] -= eta * m_hat / (std::sqrt(v_hat) + state.epsilon);
      }
      break;
    }
    case OptimizerKind::adagrad: {
      if (state.accumulator.size() != n)
        throw std::invalid_argument("optimizer: adagrad state length mismatch");
      for (std::size_t j = 0; j < n; ++j) {
        const double g = grad.values[j];
        state.accumulator[j] += g * g;
        model.params[j] -= eta * g / (std::sqrt(state.accumulator[j]) + state.epsilon);
      }
      break;
    }
  }
  state.step_count += 1;
}

}  // namespace pu
