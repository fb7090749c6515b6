#pragma once

#include <string>
#include <vector>

#include "pu/config.h"
#include "pu/lab.h"
#include "pu/risk.h"
#include "pu/trainer.h"

namespace pu::commands {

struct MethodRun {
  EstimatorKind method;
  std::vector<EpochLog> logs;
  RiskBreakdown final_breakdown;  // surrogate loss, full training data, final model
  std::string csv_path;
};

struct TrainOutcome {
  std::vector<MethodRun> runs;
  std::string combined_csv_path;
  std::string breakdown_csv_path;
  std::string svg_path;  // empty unless svg emission was requested
};

TrainOutcome run_train(const RunConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct StudyOutcome {
  std::vector<CheckResult> checks;
  std::vector<EstimatorStats> stats_rows;   // one per executed fixed-size study
  std::vector<EstimatorStats> sweep_rows;   // size sweep, when enabled
  std::vector<std::string> csv_paths;

  bool all_passed() const;
};

StudyOutcome run_study(const RunConfig& cfg);

struct SweepPriorRow {
  double scale = 1.0;
  double pi_given = 0.5;
  double best_test_eval = 0.0;
  std::size_t best_epoch = 0;
};

struct SweepPriorOutcome {
  std::vector<SweepPriorRow> rows;
  std::string summary_csv_path;
  std::string epochs_csv_path;
};

SweepPriorOutcome run_sweep_prior(const RunConfig& cfg);

struct MnistSummary {
  std::size_t n_train = 0;
  std::size_t dim = 0;
  double pi_p_train = 0.0;
  bool has_test = false;
  std::size_t n_test = 0;
  double pi_p_train_plus_test = 0.0;
};

MnistSummary run_mnist_prep(const RunConfig& cfg);

}  // namespace pu::commands
