#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <map>
#include <string>

#include "pu/commands.h"
#include "pu/config.h"

namespace {

// Collected CLI strings; only flags the user actually passed override the
// defaults/config-file values.
struct FlagSink {
  std::map<std::string, std::string> values;
  std::string config_file;

  void add_option(CLI::App* app, const std::string& flag, const std::string& key,
                  const std::string& desc) {
    app->add_option_function<std::string>(
           flag, [this, key](const std::string& v) { values[key] = v; }, desc)
        ->type_name("TEXT");
  }
};

pu::RunConfig resolve(const std::string& command, const FlagSink& sink) {
  pu::RunConfig cfg = pu::RunConfig::with_defaults(command);
  if (!sink.config_file.empty()) cfg.load_file(sink.config_file);
  for (const auto& [key, value] : sink.values) cfg.set(key, value);
  return cfg;
}

void add_common(CLI::App* app, FlagSink& sink) {
  app->add_option("--config", sink.config_file, "key = value config file");
  sink.add_option(app, "--seed", "seed", "master seed");
  sink.add_option(app, "--out", "out", "output file prefix");
  sink.add_option(app, "--threads", "threads", "thread cap (0 = all cores)");
  sink.add_option(app, "--exec", "exec", "serial | parallel");
}

void add_train_like(CLI::App* app, FlagSink& sink) {
  add_common(app, sink);
  sink.add_option(app, "--dataset", "dataset", "synthetic1d | synthetic2d | mnist");
  sink.add_option(app, "--np", "np", "P sample size");
  sink.add_option(app, "--nu", "nu", "U sample size (0 = dataset default)");
  sink.add_option(app, "--nn", "nn", "N sample size for pn (0 = protocol formula)");
  sink.add_option(app, "--ntest", "ntest", "synthetic test sample size");
  sink.add_option(app, "--epochs", "epochs", "epoch count");
  sink.add_option(app, "--batches", "batches", "minibatches per epoch");
  sink.add_option(app, "--loss", "loss", "surrogate loss name");
  sink.add_option(app, "--eval-loss", "eval_loss", "evaluation loss name");
  sink.add_option(app, "--optimizer", "optimizer", "sgd | adam | adagrad");
  sink.add_option(app, "--step-size", "step_size", "base step size (0 = default)");
  sink.add_option(app, "--adam-beta1", "adam_beta1", "adam first-moment decay");
  sink.add_option(app, "--adam-beta2", "adam_beta2", "adam second-moment decay");
  sink.add_option(app, "--optim-epsilon", "optim_epsilon", "adam/adagrad epsilon");
  sink.add_option(app, "--task-mean", "task_mean", "synthetic class means +/-(m,..,m)");
  sink.add_option(app, "--task-sigma", "task_sigma", "synthetic shared stddev");
  sink.add_option(app, "--task-pi", "task_pi", "synthetic class prior");
  sink.add_option(app, "--beta", "beta", "defect-branch tolerance");
  sink.add_option(app, "--gamma", "gamma", "defect-branch step discount");
  sink.add_option(app, "--arch", "arch", "auto | linear | \"d-..-1:act\"");
  sink.add_option(app, "--l2", "l2", "weight decay coefficient");
  sink.add_option(app, "--data-seed", "data_seed", "dataset seed (0 = derive from seed)");
  sink.add_option(app, "--dependent", "dependent", "mnist U overlaps P (true/false)");
  sink.add_option(app, "--mnist-images", "mnist_images", "train images IDX path");
  sink.add_option(app, "--mnist-labels", "mnist_labels", "train labels IDX path");
  sink.add_option(app, "--mnist-test-images", "mnist_test_images", "test images IDX path");
  sink.add_option(app, "--mnist-test-labels", "mnist_test_labels", "test labels IDX path");
  sink.add_option(app, "--svg", "svg", "emit an SVG risk chart (true/false)");
  sink.add_option(app, "--dump-data", "dump_data", "export sampled datasets to CSV");
}

int do_train(const pu::RunConfig& cfg) {
  const auto outcome = pu::commands::run_train(cfg);
  for (const auto& run : outcome.runs) {
    const auto& last = run.logs.back();
    std::printf("%-5s final: train %s = %.6f, test %s = %.6f, defect_frac = %.3f -> %s\n",
                pu::to_string(run.method).c_str(), cfg.get_str("loss").c_str(),
                last.train_surrogate, cfg.get_str("eval_loss").c_str(), last.test_eval,
                last.defect_fraction, run.csv_path.c_str());
  }
  std::printf("combined: %s\n", outcome.combined_csv_path.c_str());
  if (!outcome.svg_path.empty()) std::printf("chart: %s\n", outcome.svg_path.c_str());
  return 0;
}

int do_study(const pu::RunConfig& cfg) {
  const auto outcome = pu::commands::run_study(cfg);
  for (const auto& check : outcome.checks)
    std::printf("[%s] %-12s %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                check.detail.c_str());
  for (const auto& path : outcome.csv_paths) std::printf("wrote %s\n", path.c_str());
  return outcome.all_passed() ? 0 : 1;
}

int do_sweep_prior(const pu::RunConfig& cfg) {
  const auto outcome = pu::commands::run_sweep_prior(cfg);
  for (const auto& row : outcome.rows)
    std::printf("pi' = %.4f (%.2fx): best test risk %.6f at epoch %zu\n", row.pi_given, row.scale,
                row.best_test_eval, row.best_epoch);
  std::printf("summary: %s\n", outcome.summary_csv_path.c_str());
  return 0;
}

int do_mnist_prep(const pu::RunConfig& cfg) {
  const auto s = pu::commands::run_mnist_prep(cfg);
  std::printf("train: %zu samples, %zu features\n", s.n_train, s.dim);
  std::printf("pi_p (train, even digits as P): %.4f\n", s.pi_p_train);
  if (s.has_test) {
    std::printf("test: %zu samples\n", s.n_test);
    std::printf("pi_p (train+test): %.4f\n", s.pi_p_train_plus_test);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"positive-unlabeled learning toolkit"};
  app.require_subcommand(1);

  FlagSink train_sink, study_sink, sweep_sink, prep_sink;

  CLI::App* train = app.add_subcommand("train", "train pn/upu/nnpu classifiers and log risk curves");
  add_train_like(train, train_sink);
  train_sink.add_option(train, "--methods", "methods", "comma list of pn,upu,nnpu");
  train_sink.add_option(train, "--pi-given-scale", "pi_given_scale", "train with pi' = scale * pi");

  CLI::App* study = app.add_subcommand("study", "Monte Carlo estimator checks at a fixed classifier");
  add_common(study, study_sink);
  study_sink.add_option(study, "--task", "task", "synthetic1d | synthetic2d");
  study_sink.add_option(study, "--check", "check", "comma list of unbiasedness,equivalence,mse");
  study_sink.add_option(study, "--sweep", "sweep", "sizes");
  study_sink.add_option(study, "--loss", "loss", "loss name");
  study_sink.add_option(study, "--np", "np", "P sample size per replication");
  study_sink.add_option(study, "--nu", "nu", "U sample size per replication");
  study_sink.add_option(study, "--reps", "reps", "replication count");
  study_sink.add_option(study, "--g-scale", "g_scale", "fixed classifier slope");
  study_sink.add_option(study, "--g-bias", "g_bias", "fixed classifier intercept");
  study_sink.add_option(study, "--mse-bound-betas", "mse_bound_betas", "beta grid, multiples of pi_p");
  study_sink.add_option(study, "--grid", "grid", "size sweep grid np:nu,...");

  CLI::App* sweep = app.add_subcommand("sweep-prior", "nnpu training across misspecified priors");
  add_train_like(sweep, sweep_sink);
  sweep_sink.add_option(sweep, "--grid", "grid", "comma list of pi multipliers");

  CLI::App* prep = app.add_subcommand("mnist-prep", "validate and summarize an MNIST IDX pair");
  prep_sink.add_option(prep, "--images", "images", "train images IDX path");
  prep_sink.add_option(prep, "--labels", "labels", "train labels IDX path");
  prep_sink.add_option(prep, "--test-images", "test_images", "test images IDX path");
  prep_sink.add_option(prep, "--test-labels", "test_labels", "test labels IDX path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return do_train(resolve("train", train_sink));
    if (study->parsed()) return do_study(resolve("study", study_sink));
    if (sweep->parsed()) return do_sweep_prior(resolve("sweep-prior", sweep_sink));
    if (prep->parsed()) return do_mnist_prep(resolve("mnist-prep", prep_sink));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
