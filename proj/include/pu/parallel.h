#pragma once

#include <cstddef>
#include <span>

namespace pu {

// Execution policy for the data-parallel kernels. Every kernel produces
// bitwise-identical results under either policy and any thread count: row
// loops have no cross-row dependencies, and reductions always use the same
// fixed tree (chunked accumulation + ordered merge), so the policy only
// affects speed. The serial path is kept as the reference implementation
// for the equivalence tests and the benchmark.
enum class Exec { serial, parallel };

namespace par {

// Number of threads the parallel policy will use (OpenMP max threads, or 1
// when built without OpenMP).
int max_threads();

// Clamp the parallel policy to `n` threads; n <= 0 restores the default.
void set_threads(int n);

// Deterministic pairwise sum. The reduction tree depends only on xs.size().
double pairwise_sum(std::span<const double> xs);

// Run fn(i) for i in [0, n). Under Exec::parallel the iterations are spread
// across threads; fn must only write state owned by iteration i.
template <typename Fn>
void for_each_index(Exec ex, std::size_t n, Fn&& fn);

}  // namespace par
}  // namespace pu

// ---- implementation ----

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pu::par {

template <typename Fn>
void for_each_index(Exec ex, std::size_t n, Fn&& fn) {
  if (ex == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace pu::par
