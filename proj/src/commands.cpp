#include "pu/commands.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pu/csv.h"
#include "pu/rng.h"
#include "pu/svg.h"

namespace pu::commands {

namespace {

constexpr std::uint64_t kDataStream = 0x44617461;

Exec exec_from(const RunConfig& cfg) {
  par::set_threads(static_cast<int>(cfg.get_int("threads")));
  const std::string& mode = cfg.get_str("exec");
  if (mode == "serial") return Exec::serial;
  if (mode == "parallel") return Exec::parallel;
  throw std::invalid_argument("config: exec must be serial or parallel");
}

std::string method_color(EstimatorKind m) {
  switch (m) {
    case EstimatorKind::pn: return "#2ca02c";
    case EstimatorKind::upu: return "#d62728";
    case EstimatorKind::nnpu: return "#1f77b4";
  }
  return "#000000";
}

std::map<std::string, std::string> resolved_metadata(const RunConfig& cfg) {
  std::map<std::string, std::string> md;
  md["command"] = cfg.command();
  for (const auto& [k, v] : cfg.entries()) md[k] = v;
  return md;
}

GaussianTask task_by_name(const std::string& name) {
  if (name == "synthetic1d") return GaussianTask::default_1d();
  if (name == "synthetic2d") return GaussianTask::default_2d();
  throw std::invalid_argument("unknown synthetic task: " + name);
}

struct DatasetBundle {
  PuDataset data;
  std::size_t dim = 0;
  std::uint64_t data_seed = 0;
};

DatasetBundle build_dataset(const RunConfig& cfg, bool need_n_sample) {
  const std::string dataset = cfg.get_str("dataset");
  const std::size_t np = static_cast<std::size_t>(cfg.get_int("np"));
  std::size_t nu = static_cast<std::size_t>(cfg.get_int("nu"));
  // sweep-prior sets the scale per grid point instead of via this key
  const double pi_scale = cfg.has("pi_given_scale") ? cfg.get_double("pi_given_scale") : 1.0;

  DatasetBundle bundle;
  bundle.data_seed = cfg.get_u64("data_seed");
  if (bundle.data_seed == 0) bundle.data_seed = mix_seed(cfg.get_u64("seed"), kDataStream);

  if (dataset == "mnist") {
    const std::string images = cfg.get_str("mnist_images");
    const std::string labels = cfg.get_str("mnist_labels");
    if (images.empty() || labels.empty())
      throw std::invalid_argument("train: mnist dataset needs mnist_images and mnist_labels");
    const LabeledDataset train = load_mnist_idx(images, labels);
    const double pi_given = train.positive_fraction() * pi_scale;
    std::size_t nn = static_cast<std::size_t>(cfg.get_int("nn"));
    if (need_n_sample && nn == 0) nn = pn_sample_size(np, pi_given);
    const USampleMode mode = nu == 0 ? USampleMode::all_train : USampleMode::count;
    bundle.data = make_pu_from_labeled(train, np, mode, nu, cfg.get_bool("dependent"), pi_given,
                                       bundle.data_seed, need_n_sample ? nn : 0);
    const std::string test_images = cfg.get_str("mnist_test_images");
    const std::string test_labels = cfg.get_str("mnist_test_labels");
    if (test_images.empty() || test_labels.empty())
      throw std::invalid_argument("train: mnist dataset needs a test IDX pair for epoch logs");
    attach_test_set(bundle.data, load_mnist_idx(test_images, test_labels));
  } else {
    GaussianTask task = task_by_name(dataset);
    if (cfg.has("task_mean") && cfg.get_double("task_mean") != 0.0) {
      const double m = cfg.get_double("task_mean");
      task.mean_p.assign(task.d, m);
      task.mean_n.assign(task.d, -m);
    }
    if (cfg.has("task_sigma") && cfg.get_double("task_sigma") != 0.0)
      task.sigma = cfg.get_double("task_sigma");
    if (cfg.has("task_pi") && cfg.get_double("task_pi") != 0.0) task.pi_p = cfg.get_double("task_pi");
    if (nu == 0) nu = 100 * np;
    SampleCounts counts;
    counts.n_p = np;
    counts.n_u = nu;
    counts.n_test = static_cast<std::size_t>(cfg.get_int("ntest"));
    const double pi_given = task.pi_p * pi_scale;
    std::size_t nn = static_cast<std::size_t>(cfg.get_int("nn"));
    if (need_n_sample && nn == 0) nn = pn_sample_size(np, pi_given);
    counts.n_n = need_n_sample ? nn : 0;
    bundle.data = sample_task(task, counts, bundle.data_seed);
    bundle.data.pi_p_given = pi_given;
  }
  if (!(bundle.data.pi_p_given > 0.0 && bundle.data.pi_p_given < 1.0))
    throw std::invalid_argument("train: scaled prior left (0,1)");
  bundle.dim = bundle.data.dim();
  return bundle;
}

Architecture resolve_arch(const RunConfig& cfg, std::size_t dim) {
  const std::string spec = cfg.get_str("arch");
  if (spec == "auto") {
    return Architecture::parse(std::to_string(dim) + "-100-1:relu");
  }
  if (spec == "linear") return Architecture::linear(dim);
  Architecture arch = Architecture::parse(spec);
  if (arch.input_dim != dim)
    throw std::invalid_argument("train: arch input width " + std::to_string(arch.input_dim) +
                                " does not match dataset dimension " + std::to_string(dim));
  return arch;
}

TrainConfig build_train_config(const RunConfig& cfg, const DatasetBundle& bundle,
                               EstimatorKind method, Exec ex) {
  TrainConfig tc;
  tc.method = method;
  tc.beta = cfg.get_double("beta");
  tc.gamma = cfg.get_double("gamma");
  tc.epochs = static_cast<std::size_t>(cfg.get_int("epochs"));
  tc.batches_per_epoch = static_cast<std::size_t>(cfg.get_int("batches"));
  tc.loss = loss_spec(parse_loss_kind(cfg.get_str("loss")));
  tc.eval_loss = loss_spec(parse_loss_kind(cfg.get_str("eval_loss")));
  tc.optimizer = parse_optimizer_kind(cfg.get_str("optimizer"));
  tc.step_size = cfg.get_double("step_size");
  tc.adam_beta1 = cfg.get_double("adam_beta1");
  tc.adam_beta2 = cfg.get_double("adam_beta2");
  tc.optim_epsilon = cfg.get_double("optim_epsilon");
  tc.arch = resolve_arch(cfg, bundle.dim);
  tc.l2_coefficient = cfg.get_double("l2");
  tc.seed = cfg.get_u64("seed");
  tc.ex = ex;
  return tc;
}

const std::vector<std::string> kEpochCols = {"epoch", "train_surrogate", "train_eval", "test_eval",
                                             "defect_frac"};

void write_epoch_rows(CsvWriter& csv, const std::vector<EpochLog>& logs) {
  for (const EpochLog& log : logs)
    csv.row({static_cast<double>(log.epoch), log.train_surrogate, log.train_eval, log.test_eval,
             log.defect_fraction});
}

RiskBreakdown final_breakdown(const Model& model, const PuDataset& data, const TrainConfig& tc) {
  const std::vector<double> p_scores = forward(model, RowBatch(data.p_points), tc.ex);
  if (tc.method == EstimatorKind::pn) {
    RiskBreakdown b = breakdown_from_scores(tc.loss, p_scores, {}, data.pi_p_given, tc.ex);
    attach_n_scores(b, tc.loss, forward(model, RowBatch(data.n_points), tc.ex), tc.ex);
    return b;
  }
  return breakdown_from_scores(tc.loss, p_scores,
                               forward(model, RowBatch(data.u_points), tc.ex), data.pi_p_given,
                               tc.ex);
}

}  // namespace

TrainOutcome run_train(const RunConfig& cfg) {
  const Exec ex = exec_from(cfg);
  std::vector<EstimatorKind> methods;
  for (const std::string& name : cfg.get_list("methods"))
    methods.push_back(parse_estimator_kind(name));
  if (methods.empty()) throw std::invalid_argument("train: no methods requested");

  const bool need_n = std::find(methods.begin(), methods.end(), EstimatorKind::pn) != methods.end();
  DatasetBundle bundle = build_dataset(cfg, need_n);

  auto md = resolved_metadata(cfg);
  md["resolved_data_seed"] = std::to_string(bundle.data_seed);
  md["resolved_pi_true"] = format_double(bundle.data.pi_p_true);
  md["resolved_pi_given"] = format_double(bundle.data.pi_p_given);
  md["resolved_np"] = std::to_string(bundle.data.p_points.rows);
  md["resolved_nu"] = std::to_string(bundle.data.u_points.rows);
  md["resolved_nn"] = std::to_string(bundle.data.n_points.rows);

  const std::string out = cfg.get_str("out");
  TrainOutcome outcome;

  for (EstimatorKind method : methods) {
    const TrainConfig tc = build_train_config(cfg, bundle, method, ex);
    TrainResult res = train(bundle.data, tc);

    MethodRun run;
    run.method = method;
    run.logs = std::move(res.logs);
    run.final_breakdown = final_breakdown(res.model, bundle.data, tc);
    run.csv_path = out + "_" + to_string(method) + ".csv";

    auto method_md = md;
    method_md["resolved_method"] = to_string(method);
    method_md["resolved_arch"] = tc.arch.to_string();
    method_md["resolved_step_size"] =
        format_double(tc.step_size > 0.0 ? tc.step_size : default_step_size(tc.optimizer));
    CsvWriter csv(run.csv_path);
    csv.metadata(method_md);
    csv.header(kEpochCols);
    write_epoch_rows(csv, run.logs);
    outcome.runs.push_back(std::move(run));
  }

  outcome.combined_csv_path = out + "_combined.csv";
  {
    CsvWriter csv(outcome.combined_csv_path);
    csv.metadata(md);
    std::vector<std::string> cols = {"method"};
    cols.insert(cols.end(), kEpochCols.begin(), kEpochCols.end());
    csv.header(cols);
    for (const MethodRun& run : outcome.runs)
      for (const EpochLog& log : run.logs)
        csv.raw_row(to_string(run.method) + "," + format_double(static_cast<double>(log.epoch)) +
                    "," + format_double(log.train_surrogate) + "," + format_double(log.train_eval) +
                    "," + format_double(log.test_eval) + "," + format_double(log.defect_fraction));
  }

  outcome.breakdown_csv_path = out + "_breakdown.csv";
  {
    CsvWriter csv(outcome.breakdown_csv_path);
    csv.metadata(md);
    csv.header({"method," + breakdown_csv_header()});
    for (const MethodRun& run : outcome.runs)
      csv.raw_row(to_string(run.method) + "," + breakdown_csv_row(run.final_breakdown));
  }

  if (cfg.get_bool("dump_data")) {
    write_points_csv(out + "_p.csv", bundle.data.p_points);
    write_points_csv(out + "_u.csv", bundle.data.u_points);
    write_points_csv(out + "_test.csv", bundle.data.test_points, &bundle.data.test_labels);
    if (bundle.data.n_points.rows > 0) write_points_csv(out + "_n.csv", bundle.data.n_points);
  }

  if (cfg.get_bool("svg")) {
    outcome.svg_path = out + ".svg";
    SvgLineChart chart;
    chart.title = "risk curves";
    chart.x_label = "epoch";
    chart.y_label = "risk";
    for (const MethodRun& run : outcome.runs) {
      SvgSeries test_series, train_series;
      test_series.name = to_string(run.method) + " test (" + cfg.get_str("eval_loss") + ")";
      train_series.name = to_string(run.method) + " train (" + cfg.get_str("loss") + ")";
      test_series.color = train_series.color = method_color(run.method);
      train_series.dashed = true;
      for (const EpochLog& log : run.logs) {
        test_series.x.push_back(static_cast<double>(log.epoch));
        test_series.y.push_back(log.test_eval);
        train_series.x.push_back(static_cast<double>(log.epoch));
        train_series.y.push_back(log.train_surrogate);
      }
      chart.add(std::move(train_series));
      chart.add(std::move(test_series));
    }
    chart.write(outcome.svg_path);
  }
  return outcome;
}

namespace {

Model study_classifier(const GaussianTask& task, double g_scale, double g_bias) {
  std::vector<double> dir(task.d);
  double norm = 0.0;
  for (std::size_t j = 0; j < task.d; ++j) {
    dir[j] = task.mean_p[j] - task.mean_n[j];
    norm += dir[j] * dir[j];
  }
  norm = std::sqrt(norm);
  for (double& v : dir) v = g_scale * v / norm;
  return make_linear_model(dir, g_bias);
}

std::vector<std::pair<std::size_t, std::size_t>> parse_size_grid(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> grid;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("study: grid entries must be np:nu, got " + tok);
    grid.emplace_back(std::stoull(tok.substr(0, colon)), std::stoull(tok.substr(colon + 1)));
  }
  return grid;
}

const std::vector<std::string> kStatsCols = {
    "n_p",      "n_u",      "replications", "oracle_risk",   "mean_upu",    "mean_nnpu",
    "bias_upu", "bias_nnpu", "mse_upu",     "mse_nnpu",      "stderr_upu",  "stderr_nnpu",
    "pr_d_minus", "d_minus_count"};

std::vector<double> stats_row(const EstimatorStats& s) {
  return {static_cast<double>(s.n_p),
          static_cast<double>(s.n_u),
          static_cast<double>(s.replications),
          s.oracle_risk,
          s.mean_upu,
          s.mean_nnpu,
          s.bias_upu,
          s.bias_nnpu,
          s.mse_upu,
          s.mse_nnpu,
          s.stderr_upu,
          s.stderr_nnpu,
          s.pr_d_minus,
          static_cast<double>(s.d_minus_count)};
}

std::string fmt_check(double value) { return format_double(value); }

}  // namespace

bool StudyOutcome::all_passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

StudyOutcome run_study(const RunConfig& cfg) {
  const Exec ex = exec_from(cfg);
  const GaussianTask task = task_by_name(cfg.get_str("task"));
  const Model g = study_classifier(task, cfg.get_double("g_scale"), cfg.get_double("g_bias"));
  const LossSpec loss = loss_spec(parse_loss_kind(cfg.get_str("loss")));
  const std::size_t np = static_cast<std::size_t>(cfg.get_int("np"));
  const std::size_t nu = static_cast<std::size_t>(cfg.get_int("nu"));
  const std::size_t reps = static_cast<std::size_t>(cfg.get_int("reps"));
  const std::uint64_t seed = cfg.get_u64("seed");
  const std::string out = cfg.get_str("out");

  const std::vector<std::string> checks = cfg.get_list("check");
  const std::string sweep = cfg.get_str("sweep");
  if (checks.empty() && sweep.empty())
    throw std::invalid_argument("study: nothing enabled; pass check=... and/or sweep=sizes");

  StudyOutcome outcome;
  const auto md = resolved_metadata(cfg);

  for (const std::string& name : checks) {
    if (name == "unbiasedness") {
      const EstimatorStats s = replicate(task, g, loss, np, nu, reps, seed, ex);
      outcome.stats_rows.push_back(s);
      CheckResult c;
      c.name = name;
      c.passed = std::fabs(s.bias_upu) <= 4.0 * s.stderr_upu;
      c.detail = "bias_upu=" + fmt_check(s.bias_upu) + " vs 4*stderr=" +
                 fmt_check(4.0 * s.stderr_upu) + " (oracle=" + fmt_check(s.oracle_risk) + ")";
      outcome.checks.push_back(c);
    } else if (name == "equivalence") {
      const ReplicationDraws draws = run_replications(task, g, loss, np, nu, reps, seed, ex);
      std::size_t gt = 0, lt = 0;
      for (std::size_t r = 0; r < draws.upu.size(); ++r) {
        gt += draws.nnpu[r] > draws.upu[r] ? 1 : 0;
        lt += draws.nnpu[r] < draws.upu[r] ? 1 : 0;
      }
      CheckResult c;
      c.name = name;
      c.passed = lt == 0 && gt == draws.d_minus_count;
      c.detail = "estimators differ on " + std::to_string(gt) + " of " +
                 std::to_string(draws.upu.size()) + " replications, negative-term events " +
                 std::to_string(draws.d_minus_count) + ", dominance violations " +
                 std::to_string(lt);
      outcome.checks.push_back(c);
      const EstimatorStats s = replicate(task, g, loss, np, nu, reps, seed, ex);
      outcome.stats_rows.push_back(s);
    } else if (name == "mse") {
      std::vector<double> betas;
      for (double factor : cfg.get_double_list("mse_bound_betas")) betas.push_back(factor * task.pi_p);
      const MseReport report = mse_comparison(task, g, loss, np, nu, reps, seed, betas, ex);
      outcome.stats_rows.push_back(report.stats);

      CheckResult c;
      c.name = name;
      if (!report.any_d_minus) {
        c.passed = false;
        c.detail = "no D- event in " + std::to_string(reps) +
                   " replications; estimators never differed (increase reps or shrink np)";
      } else {
        bool bound_ok = true;
        for (const MseBoundRow& row : report.mse_bound_rows) bound_ok = bound_ok && row.holds;
        c.passed = report.mse_diff > 4.0 * report.paired_stderr && bound_ok;
        c.detail = "mse_upu-mse_nnpu=" + fmt_check(report.mse_diff) + " (" +
                   fmt_check(report.paired_stderr > 0.0 ? report.mse_diff / report.paired_stderr
                                                        : 0.0) +
                   " paired stderr), bound " + (bound_ok ? "holds" : "violated");
      }
      outcome.checks.push_back(c);

      const std::string bound_path = out + "_mse_bound.csv";
      CsvWriter csv(bound_path);
      csv.metadata(md);
      csv.comment("nu_np_factor = " + format_double(report.nu_np_factor));
      csv.header({"beta", "pr_exceed", "rhs", "mse_diff", "holds"});
      for (const MseBoundRow& row : report.mse_bound_rows)
        csv.row({row.beta, row.pr_exceed, row.rhs, report.mse_diff, row.holds ? 1.0 : 0.0});
      outcome.csv_paths.push_back(bound_path);
    } else {
      throw std::invalid_argument("study: unknown check \"" + name + "\"");
    }
  }

  if (!sweep.empty()) {
    if (sweep != "sizes") throw std::invalid_argument("study: unknown sweep \"" + sweep + "\"");
    const auto grid = parse_size_grid(cfg.get_str("grid"));
    outcome.sweep_rows = consistency_sweep(task, g, loss, grid, reps, seed, ex);

    bool unbiased_ok = true, bias_trend_ok = true, pr_trend_ok = true;
    for (std::size_t i = 0; i < outcome.sweep_rows.size(); ++i) {
      const EstimatorStats& s = outcome.sweep_rows[i];
      unbiased_ok = unbiased_ok && std::fabs(s.bias_upu) <= 4.0 * s.stderr_upu;
      if (i > 0) {
        const EstimatorStats& prev = outcome.sweep_rows[i - 1];
        const double slack =
            2.0 * std::sqrt(prev.stderr_nnpu * prev.stderr_nnpu + s.stderr_nnpu * s.stderr_nnpu);
        bias_trend_ok = bias_trend_ok && s.bias_nnpu <= prev.bias_nnpu + slack;
        const WilsonInterval wi_prev = wilson_interval(prev.d_minus_count, prev.replications);
        const WilsonInterval wi_cur = wilson_interval(s.d_minus_count, s.replications);
        pr_trend_ok = pr_trend_ok && wi_cur.lo <= wi_prev.hi;
      }
    }
    CheckResult c;
    c.name = "sizes";
    c.passed = unbiased_ok && bias_trend_ok && pr_trend_ok;
    c.detail = std::string("unbiasedness ") + (unbiased_ok ? "ok" : "violated") + ", bias trend " +
               (bias_trend_ok ? "ok" : "violated") + ", pr_d_minus trend " +
               (pr_trend_ok ? "ok" : "violated");
    outcome.checks.push_back(c);

    const std::string sizes_path = out + "_sizes.csv";
    CsvWriter csv(sizes_path);
    csv.metadata(md);
    csv.header(kStatsCols);
    for (const EstimatorStats& s : outcome.sweep_rows) csv.row(stats_row(s));
    outcome.csv_paths.push_back(sizes_path);
  }

  if (!outcome.stats_rows.empty()) {
    const std::string stats_path = out + "_stats.csv";
    CsvWriter csv(stats_path);
    csv.metadata(md);
    csv.header(kStatsCols);
    for (const EstimatorStats& s : outcome.stats_rows) csv.row(stats_row(s));
    outcome.csv_paths.push_back(stats_path);
  }
  return outcome;
}

SweepPriorOutcome run_sweep_prior(const RunConfig& cfg) {
  const Exec ex = exec_from(cfg);
  const std::vector<double> scales = cfg.get_double_list("grid");
  if (scales.empty()) throw std::invalid_argument("sweep-prior: empty grid");

  // one dataset shared across the grid; only the prior handed to the learner changes
  DatasetBundle bundle = build_dataset(cfg, false);
  const double pi_true = bundle.data.pi_p_true;

  auto md = resolved_metadata(cfg);
  md["resolved_data_seed"] = std::to_string(bundle.data_seed);
  md["resolved_pi_true"] = format_double(pi_true);

  const std::string out = cfg.get_str("out");
  SweepPriorOutcome outcome;
  outcome.epochs_csv_path = out + "_epochs.csv";
  CsvWriter epochs_csv(outcome.epochs_csv_path);
  epochs_csv.metadata(md);
  std::vector<std::string> cols = {"pi_scale"};
  cols.insert(cols.end(), kEpochCols.begin(), kEpochCols.end());
  epochs_csv.header(cols);

  for (double scale : scales) {
    const double pi_given = pi_true * scale;
    if (!(pi_given > 0.0 && pi_given < 1.0))
      throw std::invalid_argument("sweep-prior: scale " + format_double(scale) +
                                  " pushes the prior out of (0,1)");
    bundle.data.pi_p_given = pi_given;
    const TrainConfig tc = build_train_config(cfg, bundle, EstimatorKind::nnpu, ex);
    const TrainResult res = train(bundle.data, tc);

    SweepPriorRow row;
    row.scale = scale;
    row.pi_given = pi_given;
    row.best_test_eval = std::numeric_limits<double>::infinity();
    for (const EpochLog& log : res.logs) {
      if (log.test_eval < row.best_test_eval) {
        row.best_test_eval = log.test_eval;
        row.best_epoch = log.epoch;
      }
      epochs_csv.row({scale, static_cast<double>(log.epoch), log.train_surrogate, log.train_eval,
                      log.test_eval, log.defect_fraction});
    }
    outcome.rows.push_back(row);
  }

  outcome.summary_csv_path = out + "_summary.csv";
  CsvWriter summary(outcome.summary_csv_path);
  summary.metadata(md);
  summary.header({"pi_scale", "pi_given", "best_test_eval", "best_epoch"});
  for (const SweepPriorRow& row : outcome.rows)
    summary.row({row.scale, row.pi_given, row.best_test_eval, static_cast<double>(row.best_epoch)});
  return outcome;
}

MnistSummary run_mnist_prep(const RunConfig& cfg) {
  const std::string images = cfg.get_str("images");
  const std::string labels = cfg.get_str("labels");
  if (images.empty() || labels.empty())
    throw std::invalid_argument("mnist-prep: images and labels paths are required");
  const LabeledDataset train = load_mnist_idx(images, labels);

  MnistSummary summary;
  summary.n_train = train.x.rows;
  summary.dim = train.x.cols;
  summary.pi_p_train = train.positive_fraction();
  summary.pi_p_train_plus_test = summary.pi_p_train;

  const std::string test_images = cfg.get_str("test_images");
  const std::string test_labels = cfg.get_str("test_labels");
  if (!test_images.empty() && !test_labels.empty()) {
    const LabeledDataset test = load_mnist_idx(test_images, test_labels);
    if (test.x.cols != train.x.cols)
      throw std::invalid_argument("mnist-prep: train/test feature dimensions differ");
    summary.has_test = true;
    summary.n_test = test.x.rows;
    const double pos =
        summary.pi_p_train * static_cast<double>(summary.n_train) +
        test.positive_fraction() * static_cast<double>(summary.n_test);
    summary.pi_p_train_plus_test = pos / static_cast<double>(summary.n_train + summary.n_test);
  }
  return summary;
}

}  // namespace pu::commands
