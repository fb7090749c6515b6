#include "pu/data.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "pu/quadrature.h"
#include "pu/rng.h"

namespace pu {

namespace {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

double normal_pdf(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

void check_counts_positive(const SampleCounts& c) {
  if (c.n_p == 0 || c.n_u == 0) throw std::invalid_argument("sample_task: n_p and n_u must be >= 1");
}

}  // namespace

GaussianTask GaussianTask::default_1d() {
  GaussianTask t;
  t.d = 1;
  t.mean_p = {1.0};
  t.mean_n = {-1.0};
  t.sigma = 1.0;
  t.pi_p = 0.5;
  return t;
}

GaussianTask GaussianTask::default_2d() {
  GaussianTask t;
  t.d = 2;
  t.mean_p = {1.45, 1.45};
  t.mean_n = {-1.45, -1.45};
  t.sigma = 1.0;
  t.pi_p = 0.5;
  return t;
}

void GaussianTask::validate() const {
  if (d != 1 && d != 2) throw std::invalid_argument("GaussianTask: d must be 1 or 2");
  if (mean_p.size() != d || mean_n.size() != d)
    throw std::invalid_argument("GaussianTask: mean dimension mismatch");
  if (!(sigma > 0.0)) throw std::invalid_argument("GaussianTask: sigma must be positive");
  if (!(pi_p > 0.0 && pi_p < 1.0)) throw std::invalid_argument("GaussianTask: pi_p outside (0,1)");
}

PuDataset sample_task(const GaussianTask& task, const SampleCounts& counts, std::uint64_t seed) {
  task.validate();
  check_counts_positive(counts);
  Rng rng(seed);
  PuDataset data;
  data.pi_p_true = task.pi_p;
  data.pi_p_given = task.pi_p;

  auto draw_class = [&](Matrix& m, std::size_t i, const std::vector<double>& mean) {
    for (std::size_t j = 0; j < task.d; ++j) m.at(i, j) = rng.normal(mean[j], task.sigma);
  };

  data.p_points = Matrix(counts.n_p, task.d);
  for (std::size_t i = 0; i < counts.n_p; ++i) draw_class(data.p_points, i, task.mean_p);

  data.u_points = Matrix(counts.n_u, task.d);
  for (std::size_t i = 0; i < counts.n_u; ++i)
    draw_class(data.u_points, i, rng.bernoulli(task.pi_p) ? task.mean_p : task.mean_n);

  if (counts.n_test > 0) {
    data.test_points = Matrix(counts.n_test, task.d);
    data.test_labels.resize(counts.n_test);
    for (std::size_t i = 0; i < counts.n_test; ++i) {
      const bool positive = rng.bernoulli(task.pi_p);
      draw_class(data.test_points, i, positive ? task.mean_p : task.mean_n);
      data.test_labels[i] = positive ? +1 : -1;
    }
  }

  if (counts.n_n > 0) {
    data.n_points = Matrix(counts.n_n, task.d);
    for (std::size_t i = 0; i < counts.n_n; ++i) draw_class(data.n_points, i, task.mean_n);
  }
  return data;
}

Model make_linear_model(const std::vector<double>& w, double b) {
  Model m;
  m.arch = Architecture::linear(w.size());
  m.params = w;
  m.params.push_back(b);
  m.l2_coefficient = 0.0;
  return m;
}

namespace {

struct LinearCoeffs {
  std::vector<double> w;
  double b;
};

LinearCoeffs linear_coefficients(const Model& model) {
  if (model.arch.depth() != 1)
    throw std::invalid_argument("oracle_risk: defined for linear models only");
  LinearCoeffs c;
  c.w.assign(model.params.begin(), model.params.begin() + model.arch.input_dim);
  c.b = model.params[model.arch.input_dim];
  return c;
}

// E_{x ~ N(mean, sigma^2 I)}[ l(y * (w.x + b)) ] by quadrature.
double class_expectation(const GaussianTask& task, const LinearCoeffs& g, double y,
                         const std::vector<double>& mean, const LossSpec& loss, double tol) {
  const double span = 12.0 * task.sigma;
  if (task.d == 1) {
    auto f = [&](double x) {
      return loss_value(loss, y * (g.w[0] * x + g.b)) * normal_pdf(x, mean[0], task.sigma);
    };
    return integrate_adaptive(f, mean[0] - span, mean[0] + span, tol);
  }
  auto outer = [&](double x1) {
    auto inner = [&](double x2) {
      return loss_value(loss, y * (g.w[0] * x1 + g.w[1] * x2 + g.b)) *
             normal_pdf(x2, mean[1], task.sigma);
    };
    return normal_pdf(x1, mean[0], task.sigma) *
           integrate_adaptive(inner, mean[1] - span, mean[1] + span, 1e-13);
  };
  return integrate_adaptive(outer, mean[0] - span, mean[0] + span, tol);
}

}  // namespace

double oracle_risk(const GaussianTask& task, const Model& linear_model, const LossSpec& loss) {
  task.validate();
  const LinearCoeffs g = linear_coefficients(linear_model);
  if (g.w.size() != task.d) throw std::invalid_argument("oracle_risk: model dimension mismatch");

  if (loss.kind == LossKind::zero_one) {
    // signed margin is Gaussian per class: y*g(x) ~ N(y*(w.m + b), (sigma*|w|)^2)
    const double s = task.sigma * l2_norm(g.w);
    auto margin_mean = [&](const std::vector<double>& m, double y) {
      double acc = g.b;
      for (std::size_t j = 0; j < task.d; ++j) acc += g.w[j] * m[j];
      return y * acc;
    };
    const double mu_p = margin_mean(task.mean_p, +1.0);
    const double mu_n = margin_mean(task.mean_n, -1.0);
    if (s == 0.0)
      return task.pi_p * loss_value(loss, mu_p) + (1.0 - task.pi_p) * loss_value(loss, mu_n);
    // P(margin < 0); the margin is continuous so the z=0 convention carries no mass
    return task.pi_p * normal_cdf(-mu_p / s) + (1.0 - task.pi_p) * normal_cdf(-mu_n / s);
  }

  const double tol = 4e-10;
  const double risk_p = class_expectation(task, g, +1.0, task.mean_p, loss, tol);
  const double risk_n = class_expectation(task, g, -1.0, task.mean_n, loss, tol);
  return task.pi_p * risk_p + (1.0 - task.pi_p) * risk_n;
}

double LabeledDataset::positive_fraction() const {
  if (labels.empty()) return 0.0;
  std::size_t pos = 0;
  for (int y : labels) pos += y > 0 ? 1 : 0;
  return static_cast<double>(pos) / static_cast<double>(labels.size());
}

namespace {

std::uint32_t read_be_u32(std::ifstream& in, const std::string& path) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw std::runtime_error("idx: truncated header in " + path);
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

LabeledDataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream images(images_path, std::ios::binary);
  if (!images) throw std::runtime_error("idx: cannot open " + images_path);
  std::ifstream labels(labels_path, std::ios::binary);
  if (!labels) throw std::runtime_error("idx: cannot open " + labels_path);

  const std::uint32_t images_magic = read_be_u32(images, images_path);
  if (images_magic != 0x00000803u)
    throw std::runtime_error("idx: bad images magic in " + images_path);
  const std::uint32_t n_images = read_be_u32(images, images_path);
  const std::uint32_t rows = read_be_u32(images, images_path);
  const std::uint32_t cols = read_be_u32(images, images_path);

  const std::uint32_t labels_magic = read_be_u32(labels, labels_path);
  if (labels_magic != 0x00000801u)
    throw std::runtime_error("idx: bad labels magic in " + labels_path);
  const std::uint32_t n_labels = read_be_u32(labels, labels_path);

  if (n_images != n_labels)
    throw std::runtime_error("idx: image/label count mismatch (" + std::to_string(n_images) +
                             " vs " + std::to_string(n_labels) + ")");

  const std::size_t d = static_cast<std::size_t>(rows) * cols;
  LabeledDataset out;
  out.x = Matrix(n_images, d);
  out.labels.resize(n_images);

  std::vector<unsigned char> pixel_row(d);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    images.read(reinterpret_cast<char*>(pixel_row.data()), static_cast<std::streamsize>(d));
    if (!images) throw std::runtime_error("idx: truncated image data in " + images_path);
    double* dst = out.x.row(i);
    for (std::size_t j = 0; j < d; ++j) dst[j] = static_cast<double>(pixel_row[j]) / 255.0;
  }
  std::vector<unsigned char> digit(n_labels);
  labels.read(reinterpret_cast<char*>(digit.data()), static_cast<std::streamsize>(n_labels));
  if (!labels) throw std::runtime_error("idx: truncated label data in " + labels_path);
  for (std::uint32_t i = 0; i < n_labels; ++i) out.labels[i] = digit[i] % 2 == 0 ? +1 : -1;
  return out;
}

namespace {

// first n entries of a seeded partial Fisher-Yates over `pool`
std::vector<std::uint32_t> sample_without_replacement(std::vector<std::uint32_t> pool, std::size_t n,
                                                      Rng& rng) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

Matrix gather_rows(const Matrix& src, const std::vector<std::uint32_t>& idx) {
  Matrix out(idx.size(), src.cols);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double* s = src.row(idx[i]);
    std::copy(s, s + src.cols, out.row(i));
  }
  return out;
}

}  // namespace

PuDataset make_pu_from_labeled(const LabeledDataset& labeled, std::size_t n_p, USampleMode u_mode,
                               std::size_t n_u, bool dependent, double pi_p_given,
                               std::uint64_t seed, std::size_t n_n) {
  if (!(pi_p_given > 0.0 && pi_p_given < 1.0))
    throw std::invalid_argument("make_pu_from_labeled: pi_p_given outside (0,1)");
  const std::size_t total = labeled.x.rows;
  std::vector<std::uint32_t> pool_p, pool_n;
  for (std::size_t i = 0; i < total; ++i)
    (labeled.labels[i] > 0 ? pool_p : pool_n).push_back(static_cast<std::uint32_t>(i));
  if (n_p == 0 || n_p > pool_p.size())
    throw std::invalid_argument("make_pu_from_labeled: insufficient P-labeled points");

  Rng rng(seed);
  const std::vector<std::uint32_t> p_idx = sample_without_replacement(pool_p, n_p, rng);

  std::vector<std::uint32_t> u_idx;
  if (u_mode == USampleMode::all_train) {
    if (!dependent)
      throw std::invalid_argument("make_pu_from_labeled: all_train U requires dependent sampling");
    u_idx.resize(total);
    std::iota(u_idx.begin(), u_idx.end(), 0u);
  } else {
    if (n_u == 0) throw std::invalid_argument("make_pu_from_labeled: n_u must be >= 1");
    if (dependent) {
      std::vector<std::uint32_t> all(total);
      std::iota(all.begin(), all.end(), 0u);
      u_idx = sample_without_replacement(std::move(all), std::min(n_u, static_cast<std::size_t>(total)), rng);
    } else {
      std::vector<bool> taken(total, false);
      for (std::uint32_t i : p_idx) taken[i] = true;
      std::vector<std::uint32_t> rest;
      rest.reserve(total - n_p);
      for (std::uint32_t i = 0; i < total; ++i)
        if (!taken[i]) rest.push_back(i);
      if (n_u > rest.size())
        throw std::invalid_argument("make_pu_from_labeled: n_p + n_u exceeds the labeled pool");
      u_idx = sample_without_replacement(std::move(rest), n_u, rng);
    }
  }

  PuDataset data;
  data.p_points = gather_rows(labeled.x, p_idx);
  data.u_points = gather_rows(labeled.x, u_idx);
  data.pi_p_true = labeled.positive_fraction();
  data.pi_p_given = pi_p_given;

  if (n_n > 0) {
    if (n_n > pool_n.size())
      throw std::invalid_argument("make_pu_from_labeled: insufficient N-labeled points");
    data.n_points = gather_rows(labeled.x, sample_without_replacement(pool_n, n_n, rng));
  }
  return data;
}

void attach_test_set(PuDataset& data, const LabeledDataset& test) {
  if (test.x.rows == 0) throw std::invalid_argument("attach_test_set: empty test set");
  if (data.dim() != 0 && test.x.cols != data.dim())
    throw std::invalid_argument("attach_test_set: dimension mismatch");
  data.test_points = test.x;
  data.test_labels = test.labels;
}

void write_points_csv(const std::string& path, const Matrix& points, const std::vector<int>* labels) {
  if (labels && labels->size() != points.rows)
    throw std::invalid_argument("write_points_csv: label count mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_points_csv: cannot open " + path);
  for (std::size_t j = 0; j < points.cols; ++j) out << (j ? ",x" : "x") << j + 1;
  if (labels) out << ",label";
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < points.rows; ++i) {
    for (std::size_t j = 0; j < points.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", points.at(i, j));
      out << (j ? "," : "") << buf;
    }
    if (labels) out << "," << (*labels)[i];
    out << "\n";
  }
}

}  // namespace pu
