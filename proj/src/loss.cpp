#include "pu/loss.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1/(1+e^z) evaluated on the branch that never overflows.
double mirrored_logistic(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

bool LossSpec::bounded() const { return std::isfinite(sup_value); }

LossSpec loss_spec(LossKind kind) {
  switch (kind) {
    case LossKind::zero_one:
      return {kind, 1.0, kInf, true, false, false};
    case LossKind::ramp:
      return {kind, 1.0, 0.5, true, false, false};
    case LossKind::squared:
      return {kind, kInf, kInf, false, true, true};
    case LossKind::logistic:
      return {kind, kInf, 1.0, false, true, true};
    case LossKind::hinge:
      return {kind, kInf, 1.0, false, false, false};
    case LossKind::double_hinge:
      return {kind, kInf, 1.0, false, true, false};
    case LossKind::sigmoid:
      return {kind, 1.0, 0.25, true, false, true};
  }
  throw std::invalid_argument("unknown loss kind");
}

double loss_value(const LossSpec& spec, double z) {
  switch (spec.kind) {
    case LossKind::zero_one:
      if (z > 0.0) return 0.0;
      if (z < 0.0) return 1.0;
      return 0.5;
    case LossKind::ramp:
      return std::max(0.0, std::min(1.0, 0.5 * (1.0 - z)));
    case LossKind::squared:
      return 0.25 * (z - 1.0) * (z - 1.0);
    case LossKind::logistic:
      // ln(1+e^-z) without overflow on either side
      return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    case LossKind::hinge:
      return std::max(0.0, 1.0 - z);
    case LossKind::double_hinge:
      return std::max(std::max(0.0, 0.5 * (1.0 - z)), -z);
    case LossKind::sigmoid:
      return mirrored_logistic(z);
  }
  throw std::invalid_argument("unknown loss kind");
}

double loss_derivative(const LossSpec& spec, double z) {
  switch (spec.kind) {
    case LossKind::zero_one:
      throw std::domain_error("zero_one loss has no usable derivative");
    case LossKind::ramp:
      return (z >= -1.0 && z < 1.0) ? -0.5 : 0.0;
    case LossKind::squared:
      return 0.5 * (z - 1.0);
    case LossKind::logistic:
      return -mirrored_logistic(z);
    case LossKind::hinge:
      return z < 1.0 ? -1.0 : 0.0;
    case LossKind::double_hinge:
      if (z < -1.0) return -1.0;
      return z < 1.0 ? -0.5 : 0.0;
    case LossKind::sigmoid: {
      const double v = mirrored_logistic(z);
      return -v * (1.0 - v);
    }
  }
  throw std::invalid_argument("unknown loss kind");
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "zero_one") return LossKind::zero_one;
  if (name == "ramp") return LossKind::ramp;
  if (name == "squared") return LossKind::squared;
  if (name == "logistic") return LossKind::logistic;
  if (name == "hinge") return LossKind::hinge;
  if (name == "double_hinge") return LossKind::double_hinge;
  if (name == "sigmoid") return LossKind::sigmoid;
  throw std::invalid_argument("unknown loss kind: " + name);
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::zero_one: return "zero_one";
    case LossKind::ramp: return "ramp";
    case LossKind::squared: return "squared";
    case LossKind::logistic: return "logistic";
    case LossKind::hinge: return "hinge";
    case LossKind::double_hinge: return "double_hinge";
    case LossKind::sigmoid: return "sigmoid";
  }
  return "?";
}

}  // namespace pu
