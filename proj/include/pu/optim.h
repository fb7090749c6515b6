#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pu/model.h"

namespace pu {

enum class OptimizerKind { sgd, adam, adagrad };

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

double default_step_size(OptimizerKind kind);

// State for the stochastic update rules. The `discount` argument of step()
// scales a single applied update (the defect-branch step-size discount); it
// never enters the stored moments or accumulators.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  double base_step_size = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;

  std::vector<double> moment1;      // adam
  std::vector<double> moment2;      // adam
  std::vector<double> accumulator;  // adagrad

  static OptimizerState make(OptimizerKind kind, double step_size, std::size_t n_params);
};

// One update with effective step size discount * base_step_size. Throws on
// non-finite gradient entries, leaving model and state untouched.
void step(OptimizerState& state, Model& model, const GradientBuffer& grad, double discount = 1.0);

}  // namespace pu
