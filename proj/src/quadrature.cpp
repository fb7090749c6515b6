#include "pu/quadrature.h"

#include <cmath>
#include <stdexcept>

namespace pu {

std::vector<QuadNode> gauss_legendre_rule(int order) {
  if (order < 2) throw std::invalid_argument("gauss_legendre_rule: order must be >= 2");
  std::vector<QuadNode> rule(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess
    double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[i] = {-x, w};
    rule[order - 1 - i] = {x, w};
  }
  return rule;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order) {
  static thread_local std::vector<QuadNode> cached;
  static thread_local int cached_order = 0;
  if (cached_order != order) {
    cached = gauss_legendre_rule(order);
    cached_order = order;
  }
  const double mid = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  double sum = 0.0;
  for (const QuadNode& node : cached) sum += node.w * f(mid + hw * node.x);
  return hw * sum;
}

namespace {

double integrate_rec(const std::function<double(double)>& f, double a, double b, double whole,
                     double tol, int depth, int order) {
  if (depth <= 0) throw std::runtime_error("integrate_adaptive: refinement depth exhausted");
  const double mid = 0.5 * (a + b);
  const double left = integrate_gl(f, a, mid, order);
  const double right = integrate_gl(f, mid, b, order);
  if (std::fabs(left + right - whole) <= tol) return left + right;
  return integrate_rec(f, a, mid, left, 0.5 * tol, depth - 1, order) +
         integrate_rec(f, mid, b, right, 0.5 * tol, depth - 1, order);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate_adaptive: tolerance must be positive");
  const int order = 20;
  return integrate_rec(f, a, b, integrate_gl(f, a, b, order), abs_tol, max_depth, order);
}

}  // namespace pu
