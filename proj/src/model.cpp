#include "pu/model.h"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "pu/rng.h"

namespace pu {

namespace {

constexpr std::size_t kRowBlock = 2048;   // forward row blocking
constexpr std::size_t kGradChunk = 1024;  // backward accumulation chunk

double apply_act(Activation act, double y) {
  switch (act) {
    case Activation::relu: return y > 0.0 ? y : 0.0;
    case Activation::softsign: return y / (1.0 + std::fabs(y));
    case Activation::identity: return y;
  }
  return y;
}

// Derivative recovered from the post-activation value.
double act_derivative_from_post(Activation act, double h) {
  switch (act) {
    case Activation::relu: return h > 0.0 ? 1.0 : 0.0;
    case Activation::softsign: {
      const double t = 1.0 - std::fabs(h);
      return t * t;
    }
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "softsign") return Activation::softsign;
  if (name == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::relu: return "relu";
    case Activation::softsign: return "softsign";
    case Activation::identity: return "identity";
  }
  return "?";
}

std::size_t Architecture::param_count() const {
  std::size_t count = 0;
  std::size_t fan_in = input_dim;
  for (std::size_t w : layer_widths) {
    count += (fan_in + 1) * w;
    fan_in = w;
  }
  return count;
}

std::size_t Architecture::max_width() const {
  std::size_t m = input_dim;
  for (std::size_t w : layer_widths) m = std::max(m, w);
  return m;
}

void Architecture::validate() const {
  if (input_dim == 0) throw std::invalid_argument("architecture: input dimension must be positive");
  if (layer_widths.empty()) throw std::invalid_argument("architecture: needs at least one layer");
  if (layer_widths.size() != layer_acts.size())
    throw std::invalid_argument("architecture: widths/activations length mismatch");
  for (std::size_t w : layer_widths)
    if (w == 0) throw std::invalid_argument("architecture: zero-width layer");
  if (layer_widths.back() != 1)
    throw std::invalid_argument("architecture: output width must be 1");
  if (layer_acts.back() != Activation::identity)
    throw std::invalid_argument("architecture: output activation must be identity");
}

Architecture Architecture::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string widths_part = colon == std::string::npos ? text : text.substr(0, colon);
  const std::string act_part = colon == std::string::npos ? "relu" : text.substr(colon + 1);
  const Activation hidden = parse_activation(act_part);

  std::vector<std::size_t> widths;
  std::stringstream ss(widths_part);
  std::string tok;
  while (std::getline(ss, tok, '-')) {
    if (tok.empty()) throw std::invalid_argument("architecture: empty width in \"" + text + "\"");
    std::size_t pos = 0;
    const unsigned long v = std::stoul(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("architecture: bad width \"" + tok + "\"");
    widths.push_back(static_cast<std::size_t>(v));
  }
  if (widths.size() < 2) throw std::invalid_argument("architecture: need at least input and output widths");

  Architecture arch;
  arch.input_dim = widths.front();
  arch.layer_widths.assign(widths.begin() + 1, widths.end());
  arch.layer_acts.assign(arch.layer_widths.size(), hidden);
  arch.layer_acts.back() = Activation::identity;
  arch.validate();
  return arch;
}

Architecture Architecture::linear(std::size_t d) {
  Architecture arch;
  arch.input_dim = d;
  arch.layer_widths = {1};
  arch.layer_acts = {Activation::identity};
  arch.validate();
  return arch;
}

std::string Architecture::to_string() const {
  std::ostringstream out;
  out << input_dim;
  for (std::size_t w : layer_widths) out << '-' << w;
  Activation hidden = Activation::identity;
  if (layer_widths.size() > 1) hidden = layer_acts.front();
  out << ':' << pu::to_string(hidden);
  return out.str();
}

std::size_t Model::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  std::size_t fan_in = arch.input_dim;
  for (std::size_t l = 0; l < layer; ++l) {
    off += (fan_in + 1) * arch.layer_widths[l];
    fan_in = arch.layer_widths[l];
  }
  return off;
}

std::size_t Model::bias_offset(std::size_t layer) const {
  std::size_t fan_in = layer == 0 ? arch.input_dim : arch.layer_widths[layer - 1];
  return weight_offset(layer) + fan_in * arch.layer_widths[layer];
}

Model init_parameters(const Architecture& arch, std::uint64_t seed, double l2_coefficient) {
  arch.validate();
  Model m;
  m.arch = arch;
  m.l2_coefficient = l2_coefficient;
  m.params.assign(arch.param_count(), 0.0);

  Rng rng(seed);
  std::size_t fan_in = arch.input_dim;
  std::size_t off = 0;
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    const std::size_t fan_out = arch.layer_widths[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t k = 0; k < fan_in * fan_out; ++k) m.params[off + k] = rng.uniform(-bound, bound);
    off += (fan_in + 1) * fan_out;  // biases stay zero
    fan_in = fan_out;
  }
  return m;
}

std::vector<double> forward(const Model& model, const RowBatch& batch, Exec ex, ForwardTrace* trace) {
  model.arch.validate();
  const std::size_t n = batch.size();
  const std::size_t d = model.arch.input_dim;
  if (n > 0 && batch.m->cols != d)
    throw std::invalid_argument("forward: batch has " + std::to_string(batch.m->cols) +
                                " columns, model expects " + std::to_string(d));
  if (model.params.size() != model.arch.param_count())
    throw std::invalid_argument("forward: parameter vector length mismatch");

  const std::size_t depth = model.arch.depth();
  std::vector<double> scores(n, 0.0);

  if (trace) {
    trace->n = n;
    trace->post.assign(depth, Matrix());
    for (std::size_t l = 0; l < depth; ++l)
      trace->post[l] = Matrix(n, model.arch.layer_widths[l]);
  }

  std::vector<std::size_t> w_off(depth), b_off(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    w_off[l] = model.weight_offset(l);
    b_off[l] = model.bias_offset(l);
  }

  const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
  par::for_each_index(ex, blocks, [&](std::size_t blk) {
    const std::size_t lo = blk * kRowBlock;
    const std::size_t hi = std::min(n, lo + kRowBlock);
    std::vector<double> cur(model.arch.max_width());
    std::vector<double> nxt(model.arch.max_width());
    for (std::size_t i = lo; i < hi; ++i) {
      const double* x = batch.row(i);
      std::size_t in_w = d;
      const double* in = x;
      for (std::size_t l = 0; l < depth; ++l) {
        const std::size_t out_w = model.arch.layer_widths[l];
        const double* W = model.params.data() + w_off[l];
        const double* b = model.params.data() + b_off[l];
        double* out = trace ? trace->post[l].row(i) : nxt.data();
        for (std::size_t j = 0; j < out_w; ++j) {
          double acc = b[j];
          const double* wrow = W + j * in_w;
          for (std::size_t k = 0; k < in_w; ++k) acc += wrow[k] * in[k];
          out[j] = apply_act(model.arch.layer_acts[l], acc);
        }
        if (!trace) {
          std::swap(cur, nxt);
          in = cur.data();
        } else {
          in = trace->post[l].row(i);
        }
        in_w = out_w;
      }
      scores[i] = in[0];
    }
  });
  return scores;
}

GradientBuffer backward(const Model& model, const RowBatch& batch, const ForwardTrace& trace,
                        std::span<const double> upstream, Exec ex, bool include_l2) {
  const std::size_t n = batch.size();
  if (trace.n != n || trace.post.size() != model.arch.depth())
    throw std::invalid_argument("backward: forward trace missing or from a different batch");
  if (upstream.size() != n)
    throw std::invalid_argument("backward: upstream length does not match batch size");
  for (std::size_t l = 0; l < model.arch.depth(); ++l)
    if (trace.post[l].cols != model.arch.layer_widths[l])
      throw std::invalid_argument("backward: forward trace from a different architecture");

  const std::size_t depth = model.arch.depth();
  const std::size_t n_params = model.arch.param_count();
  std::vector<std::size_t> w_off(depth), b_off(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    w_off[l] = model.weight_offset(l);
    b_off[l] = model.bias_offset(l);
  }

  const std::size_t chunks = std::max<std::size_t>(1, (n + kGradChunk - 1) / kGradChunk);
  std::vector<std::vector<double>> chunk_grad(chunks);

  par::for_each_index(ex, chunks, [&](std::size_t c) {
    auto& g = chunk_grad[c];
    g.assign(n_params, 0.0);
    std::vector<double> delta(model.arch.max_width());
    std::vector<double> delta_prev(model.arch.max_width());
    const std::size_t lo = c * kGradChunk;
    const std::size_t hi = std::min(n, lo + kGradChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      const double u = upstream[i];
      if (u == 0.0) continue;
      // output layer is identity, so the seed delta is just u
      delta[0] = u;
      for (std::size_t l = depth; l-- > 0;) {
        const std::size_t out_w = model.arch.layer_widths[l];
        const std::size_t in_w = l == 0 ? model.arch.input_dim : model.arch.layer_widths[l - 1];
        const double* in = l == 0 ? batch.row(i) : trace.post[l - 1].row(i);
        const double* W = model.params.data() + w_off[l];
        double* gw = g.data() + w_off[l];
        double* gb = g.data() + b_off[l];
        // delta currently holds dL/dy for layer l (length out_w)
        for (std::size_t j = 0; j < out_w; ++j) {
          const double dj = delta[j];
          if (dj == 0.0) continue;
          gb[j] += dj;
          double* gwrow = gw + j * in_w;
          for (std::size_t k = 0; k < in_w; ++k) gwrow[k] += dj * in[k];
        }
        if (l == 0) break;
        for (std::size_t k = 0; k < in_w; ++k) {
          double acc = 0.0;
          for (std::size_t j = 0; j < out_w; ++j) acc += W[j * in_w + k] * delta[j];
          delta_prev[k] = acc * act_derivative_from_post(model.arch.layer_acts[l - 1], in[k]);
        }
        std::swap(delta, delta_prev);
      }
    }
  });

  GradientBuffer out;
  if (chunks == 1) {
    out.values = std::move(chunk_grad[0]);
  } else {
    out.values.assign(n_params, 0.0);
    // fixed ascending-chunk merge keeps the reduction tree thread-independent
    par::for_each_index(ex, n_params, [&](std::size_t j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < chunks; ++c) acc += chunk_grad[c][j];
      out.values[j] = acc;
    });
  }

  if (include_l2 && model.l2_coefficient > 0.0) add_l2_gradient(model, model.l2_coefficient, out);
  return out;
}

void add_l2_gradient(const Model& model, double l2, GradientBuffer& grad) {
  if (grad.values.size() != model.arch.param_count())
    throw std::invalid_argument("add_l2_gradient: gradient length mismatch");
  std::size_t fan_in = model.arch.input_dim;
  for (std::size_t l = 0; l < model.arch.depth(); ++l) {
    const std::size_t off = model.weight_offset(l);
    const std::size_t n_w = fan_in * model.arch.layer_widths[l];
    for (std::size_t k = 0; k < n_w; ++k) grad.values[off + k] += l2 * model.params[off + k];
    fan_in = model.arch.layer_widths[l];
  }
}

}  // namespace pu
