#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lriid/speccube.hpp"

namespace lriid {

struct Triplet {
  int64_t row;
  int64_t col;
  double value;
};

class SparseMatrix;

// Coordinate-format builder. Duplicate (row, col) entries sum on finalize.
class SparseOperator {
public:
  SparseOperator(int64_t rows, int64_t cols, std::string description = {})
      : rows_(rows), cols_(cols), description_(std::move(description)) {}

  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }
  const std::string& description() const { return description_; }

  void add(int64_t row, int64_t col, double value);
  void reserve(size_t n) { triplets_.reserve(n); }
  const std::vector<Triplet>& triplets() const { return triplets_; }

  // Canonical sort + duplicate merge into compressed row storage.
  SparseMatrix finalize() const;

private:
  int64_t rows_;
  int64_t cols_;
  std::string description_;
  std::vector<Triplet> triplets_;
};

// Compressed sparse rows; immutable after construction.
class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(int64_t rows, int64_t cols, std::vector<int64_t> row_ptr,
               std::vector<int64_t> col_idx, std::vector<double> values,
               std::string description = {});

  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }
  int64_t nnz() const { return int64_t(values_.size()); }
  const std::string& description() const { return description_; }
  const std::vector<int64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<int64_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  // y = A x. Parallel over rows; per-row accumulation order is fixed, so the
  // result is bitwise reproducible for any thread count.
  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_serial(std::span<const double> x, std::span<double> y) const;

  // y = A' x.
  std::vector<double> apply_transpose(std::span<const double> x) const;

  SparseMatrix transpose() const;

  // A' A, the Gram matrix of this operator (parallel and serial variants).
  SparseMatrix gram() const;
  SparseMatrix gram_serial() const;

  // this + scale * other; sparsity patterns may differ.
  SparseMatrix add_scaled(const SparseMatrix& other, double scale) const;
  SparseMatrix scaled(double scale) const;

  double symmetry_error() const;  // max |A - A'| entry, for diagnostics

  std::vector<double> to_dense() const;  // row-major rows*cols

private:
  SparseMatrix gram_impl(bool parallel) const;

  int64_t rows_ = 0;
  int64_t cols_ = 0;
  std::vector<int64_t> row_ptr_;
  std::vector<int64_t> col_idx_;
  std::vector<double> values_;
  std::string description_;
};

// MatrixMarket coordinate format (1-based, "%%MatrixMarket matrix coordinate
// real general").
void save_matrix_market(const SparseMatrix& m, const std::filesystem::path& path);
SparseMatrix load_matrix_market(const std::filesystem::path& path);

}  // namespace lriid
