#pragma once

#include <string>

namespace pu {

enum class LossKind { zero_one, ramp, squared, logistic, hinge, double_hinge, sigmoid };

// A unary margin loss l(z) with z = t*y, together with the algebraic
// properties the estimators care about. `sup_value` is finite only for
// bounded losses; `lipschitz_constant` is informational.
struct LossSpec {
  LossKind kind;
  double sup_value;            // +inf when unbounded
  double lipschitz_constant;   // +inf when not Lipschitz
  bool is_symmetric;           // l(z) + l(-z) == 1
  bool is_linear_odd;          // l(z) - l(-z) == -z
  bool is_differentiable_everywhere;

  bool bounded() const;
};

LossSpec loss_spec(LossKind kind);

// l(z). Total on finite margins.
double loss_value(const LossSpec& spec, double margin);

// dl/dz. At kinks returns the right-limit derivative. Throws
// std::domain_error for zero_one.
double loss_derivative(const LossSpec& spec, double margin);

LossKind parse_loss_kind(const std::string& name);
std::string to_string(LossKind kind);

}  // namespace pu
