#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "pu/matrix.h"
#include "pu/model.h"
#include "pu/rng.h"

namespace testutil {

// Central finite differences of f at theta.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> theta, double h = 1e-5) {
  std::vector<double> grad(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double saved = theta[j];
    theta[j] = saved + h;
    const double up = f(theta);
    theta[j] = saved - h;
    const double dn = f(theta);
    theta[j] = saved;
    grad[j] = (up - dn) / (2.0 * h);
  }
  return grad;
}

inline double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double rel_error(const std::vector<double>& got, const std::vector<double>& want) {
  std::vector<double> diff(got.size());
  for (std::size_t j = 0; j < got.size(); ++j) diff[j] = got[j] - want[j];
  return l2_norm(diff) / std::max(l2_norm(want), 1e-12);
}

// Independent reference forward pass (plain per-sample loop, no blocking or
// tricks). Returns the score and optionally the smallest |pre-activation|
// seen, for steering clear of relu kinks in finite-difference checks.
inline double reference_forward(const pu::Model& m, const double* x, double* min_abs_preact = nullptr) {
  std::vector<double> cur(x, x + m.arch.input_dim);
  std::vector<double> nxt;
  if (min_abs_preact) *min_abs_preact = 1e300;
  for (std::size_t l = 0; l < m.arch.depth(); ++l) {
    const std::size_t in_w = cur.size();
    const std::size_t out_w = m.arch.layer_widths[l];
    const double* W = m.params.data() + m.weight_offset(l);
    const double* b = m.params.data() + m.bias_offset(l);
    nxt.assign(out_w, 0.0);
    for (std::size_t j = 0; j < out_w; ++j) {
      double a = b[j];
      for (std::size_t k = 0; k < in_w; ++k) a += W[j * in_w + k] * cur[k];
      if (min_abs_preact && l + 1 < m.arch.depth()) *min_abs_preact = std::min(*min_abs_preact, std::fabs(a));
      switch (m.arch.layer_acts[l]) {
        case pu::Activation::relu: nxt[j] = a > 0.0 ? a : 0.0; break;
        case pu::Activation::softsign: nxt[j] = a / (1.0 + std::fabs(a)); break;
        case pu::Activation::identity: nxt[j] = a; break;
      }
    }
    cur = nxt;
  }
  return cur[0];
}

inline pu::Matrix random_matrix(pu::Rng& rng, std::size_t n, std::size_t d, double scale = 1.0) {
  pu::Matrix m(n, d);
  for (double& v : m.data) v = scale * rng.normal();
  return m;
}

inline std::vector<double> random_params(pu::Rng& rng, std::size_t n, double scale = 0.5) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

}  // namespace testutil
