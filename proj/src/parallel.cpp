#include "pu/parallel.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pu::par {

namespace {
int g_thread_override = 0;
}

int max_threads() {
#ifdef _OPENMP
  if (g_thread_override > 0) return g_thread_override;
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
  g_thread_override = n > 0 ? n : 0;
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#endif
}

double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n <= 32) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace pu::par
