// Times the serial reference path against the OpenMP path for the hot
// kernels. The two paths produce bitwise-identical results (asserted by the
// test suite); this target only reports throughput.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pu/lab.h"
#include "pu/model.h"
#include "pu/parallel.h"
#include "pu/risk.h"
#include "pu/rng.h"

using namespace pu;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const std::string& name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx\n", name.c_str(),
              serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 5;
  if (argc > 1) reps = std::max(1, std::atoi(argv[1]));
  std::printf("threads available: %d, reps per timing: %d\n\n", par::max_threads(), reps);

  const Architecture arch = Architecture::parse("2-100-1:relu");
  Model model = init_parameters(arch, 7, 0.0);

  Rng rng(11);
  const std::size_t n = 200000;
  Matrix x(n, 2);
  for (double& v : x.data) v = rng.normal();
  RowBatch batch(x);

  // forward
  {
    std::vector<double> sink;
    const double s = time_ms([&] { sink = forward(model, batch, Exec::serial); }, reps);
    const double p = time_ms([&] { sink = forward(model, batch, Exec::parallel); }, reps);
    report("mlp forward (200k x 2)", s, p);
  }

  // backward
  {
    ForwardTrace trace;
    forward(model, batch, Exec::parallel, &trace);
    std::vector<double> upstream(n);
    for (double& u : upstream) u = rng.uniform(-1.0, 1.0);
    GradientBuffer sink;
    const double s = time_ms([&] { sink = backward(model, batch, trace, upstream, Exec::serial); }, reps);
    const double p = time_ms([&] { sink = backward(model, batch, trace, upstream, Exec::parallel); }, reps);
    report("mlp backward (200k x 2)", s, p);
  }

  // minibatch risk gradient
  {
    Matrix p_points(1000, 2), u_points(100000, 2);
    for (double& v : p_points.data) v = rng.normal(1.0, 1.0);
    for (double& v : u_points.data) v = rng.normal(0.0, 1.4);
    RowBatch pb(p_points), ub(u_points);
    const LossSpec loss = loss_spec(LossKind::sigmoid);
    RiskGradient sink;
    const double s =
        time_ms([&] { sink = risk_gradient(model, loss, pb, ub, 0.5, 0.0, 1.0, Exec::serial); }, reps);
    const double p =
        time_ms([&] { sink = risk_gradient(model, loss, pb, ub, 0.5, 0.0, 1.0, Exec::parallel); }, reps);
    report("risk gradient (1k P, 100k U)", s, p);
  }

  // Monte Carlo replications
  {
    const GaussianTask task = GaussianTask::default_1d();
    const Model g = make_linear_model({1.0}, 0.0);
    const LossSpec loss = loss_spec(LossKind::sigmoid);
    ReplicationDraws sink;
    const double s = time_ms(
        [&] { sink = run_replications(task, g, loss, 50, 500, 2000, 99, Exec::serial); }, reps);
    const double p = time_ms(
        [&] { sink = run_replications(task, g, loss, 50, 500, 2000, 99, Exec::parallel); }, reps);
    report("lab replications (2000)", s, p);
  }
  return 0;
}
