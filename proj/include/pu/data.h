#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pu/loss.h"
#include "pu/matrix.h"
#include "pu/model.h"

namespace pu {

// A PU training problem: P sample, U sample, the generating prior and the
// prior handed to learners, plus an optional labeled test set and an
// optional N sample for PN-mode baselines.
struct PuDataset {
  Matrix p_points;
  Matrix u_points;
  double pi_p_true = 0.5;
  double pi_p_given = 0.5;
  Matrix test_points;
  std::vector<int> test_labels;  // +1 / -1
  Matrix n_points;

  std::size_t dim() const { return p_points.cols; }
};

// Two isotropic Gaussian class conditionals with a shared sigma.
struct GaussianTask {
  std::size_t d = 1;
  std::vector<double> mean_p;
  std::vector<double> mean_n;
  double sigma = 1.0;
  double pi_p = 0.5;

  static GaussianTask default_1d();  // means +/-1, sigma 1, pi 0.5
  static GaussianTask default_2d();  // means +/-(1.45,1.45); Bayes risk ~0.02
  void validate() const;
};

struct SampleCounts {
  std::size_t n_p = 0;
  std::size_t n_u = 0;
  std::size_t n_test = 0;
  std::size_t n_n = 0;  // optional PN baseline sample
};

// Draws an independent PU dataset from the task: P from the positive
// conditional, U from the mixture (per-point Bernoulli component choice),
// test points labeled by their generating component.
PuDataset sample_task(const GaussianTask& task, const SampleCounts& counts, std::uint64_t seed);

// Exact risk R(g) of a linear model under the task, by the Gaussian CDF of
// the signed margin for zero_one and by adaptive quadrature (absolute
// tolerance 1e-9; tensor grid when d == 2) for the rest.
double oracle_risk(const GaussianTask& task, const Model& linear_model, const LossSpec& loss);

Model make_linear_model(const std::vector<double>& w, double b);

struct LabeledDataset {
  Matrix x;
  std::vector<int> labels;  // +1 / -1

  double positive_fraction() const;
};

// Big-endian IDX pair (images magic 0x803, labels 0x801). Pixels scaled to
// [0,1]; even digits become the P class, odd digits the N class.
LabeledDataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

enum class USampleMode { all_train, count };

// Builds the PU two-sample problem from labeled data: n_p points drawn from
// the P pool; U is either the whole training set (dependent) or a disjoint
// sample of n_u points. n_n > 0 additionally draws a PN-baseline N sample.
PuDataset make_pu_from_labeled(const LabeledDataset& labeled, std::size_t n_p, USampleMode u_mode,
                               std::size_t n_u, bool dependent, double pi_p_given,
                               std::uint64_t seed, std::size_t n_n = 0);

void attach_test_set(PuDataset& data, const LabeledDataset& test);

// CSV export: x1..xd[,label]; label column only when labels are given.
void write_points_csv(const std::string& path, const Matrix& points,
                      const std::vector<int>* labels = nullptr);

}  // namespace pu
