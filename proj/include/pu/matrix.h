#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pu {

// Dense row-major matrix of doubles. Rows are samples, columns are features.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool empty() const { return rows == 0; }
};

// A batch is a subset of rows of a matrix. When `idx` is empty the batch is
// the whole matrix in natural order.
struct RowBatch {
  const Matrix* m = nullptr;
  std::vector<std::uint32_t> idx;

  RowBatch() = default;
  explicit RowBatch(const Matrix& mat) : m(&mat) {}
  RowBatch(const Matrix& mat, std::vector<std::uint32_t> rows_) : m(&mat), idx(std::move(rows_)) {
    for (std::uint32_t r : idx) {
      if (r >= mat.rows) throw std::out_of_range("RowBatch: row index out of range");
    }
  }

  std::size_t size() const { return idx.empty() ? (m ? m->rows : 0) : idx.size(); }
  const double* row(std::size_t k) const { return m->row(idx.empty() ? k : idx[k]); }
};

}  // namespace pu
