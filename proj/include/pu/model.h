#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pu/matrix.h"
#include "pu/parallel.h"

namespace pu {

enum class Activation { relu, softsign, identity };

Activation parse_activation(const std::string& name);
std::string to_string(Activation act);

// Feed-forward architecture: input_dim, then one entry per weighted layer.
// The final layer always has width 1 and identity activation (the model is a
// scalar decision function).
struct Architecture {
  std::size_t input_dim = 0;
  std::vector<std::size_t> layer_widths;
  std::vector<Activation> layer_acts;

  std::size_t depth() const { return layer_widths.size(); }
  std::size_t param_count() const;
  std::size_t max_width() const;

  // "784-300-1:relu" -> widths {784,300,1}, relu on hidden layers.
  static Architecture parse(const std::string& text);
  static Architecture linear(std::size_t d);
  std::string to_string() const;

  void validate() const;
};

// Decision function g(x; theta). Parameters are stored flat, layer-major:
// for each layer, weights row-major [out x in], then biases [out].
struct Model {
  Architecture arch;
  std::vector<double> params;
  double l2_coefficient = 5e-3;

  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
};

struct GradientBuffer {
  std::vector<double> values;
};

// Post-activation values of every layer for one batch; required by backward.
struct ForwardTrace {
  std::size_t n = 0;
  std::vector<Matrix> post;
};

// Glorot-uniform weights, zero biases, deterministic per seed.
Model init_parameters(const Architecture& arch, std::uint64_t seed, double l2_coefficient = 5e-3);

// Scores g(x_i) for every row of the batch. If trace is non-null it is
// filled for a subsequent backward call.
std::vector<double> forward(const Model& model, const RowBatch& batch, Exec ex = Exec::parallel,
                            ForwardTrace* trace = nullptr);

// Gradient of sum_i upstream[i] * g(x_i; theta), plus l2_coefficient * theta
// on weight entries when include_l2 is set. Exact reverse-mode accumulation;
// the reduction order is fixed, so results do not depend on thread count.
GradientBuffer backward(const Model& model, const RowBatch& batch, const ForwardTrace& trace,
                        std::span<const double> upstream, Exec ex = Exec::parallel,
                        bool include_l2 = true);

// Adds l2 * w to the weight entries of grad (biases untouched).
void add_l2_gradient(const Model& model, double l2, GradientBuffer& grad);

}  // namespace pu
