#pragma once

#include <functional>
#include <vector>

namespace pu {

struct QuadNode {
  double x;
  double w;
};

// Gauss-Legendre nodes and weights on [-1,1], Newton iteration on the
// Legendre recurrence.
std::vector<QuadNode> gauss_legendre_rule(int order);

// Fixed-order rule mapped onto [a,b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int order = 20);

// Adaptive bisection with a fixed-order panel rule; terminates when the
// two-panel refinement of an interval changes it by less than its share of
// abs_tol. Throws std::runtime_error when the recursion depth is exhausted.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 48);

}  // namespace pu
