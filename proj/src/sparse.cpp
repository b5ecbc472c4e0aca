#include "lriid/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace lriid {

void SparseOperator::add(int64_t row, int64_t col, double value) {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
    throw ValidationError("SparseOperator: index out of range");
  if (!std::isfinite(value))
    throw ValidationError("SparseOperator: non-finite value");
  if (value != 0.0) triplets_.push_back({row, col, value});
}

SparseMatrix SparseOperator::finalize() const {
  std::vector<Triplet> t = triplets_;
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int64_t> row_ptr(size_t(rows_) + 1, 0);
  std::vector<int64_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(t.size());
  values.reserve(t.size());
  size_t i = 0;
  while (i < t.size()) {
    size_t j = i;
    double acc = 0.0;
    while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col)
      acc += t[j++].value;
    col_idx.push_back(t[i].col);
    values.push_back(acc);
    row_ptr[size_t(t[i].row) + 1]++;
    i = j;
  }
  for (size_t r = 0; r < size_t(rows_); ++r) row_ptr[r + 1] += row_ptr[r];
  return SparseMatrix(rows_, cols_, std::move(row_ptr), std::move(col_idx),
                      std::move(values), description_);
}

SparseMatrix::SparseMatrix(int64_t rows, int64_t cols,
                           std::vector<int64_t> row_ptr,
                           std::vector<int64_t> col_idx,
                           std::vector<double> values, std::string description)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)), values_(std::move(values)),
      description_(std::move(description)) {
  if (row_ptr_.size() != size_t(rows_) + 1 || col_idx_.size() != values_.size())
    throw ValidationError("SparseMatrix: inconsistent CSR arrays");
}

void SparseMatrix::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != size_t(cols_) || y.size() != size_t(rows_))
    throw ValidationError("SparseMatrix::apply: size mismatch");
#pragma omp parallel for schedule(static)
  for (int64_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (int64_t i = row_ptr_[size_t(r)]; i < row_ptr_[size_t(r) + 1]; ++i)
      acc += values_[size_t(i)] * x[size_t(col_idx_[size_t(i)])];
    y[size_t(r)] = acc;
  }
}

void SparseMatrix::apply_serial(std::span<const double> x,
                                std::span<double> y) const {
  if (x.size() != size_t(cols_) || y.size() != size_t(rows_))
    throw ValidationError("SparseMatrix::apply_serial: size mismatch");
  for (int64_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (int64_t i = row_ptr_[size_t(r)]; i < row_ptr_[size_t(r) + 1]; ++i)
      acc += values_[size_t(i)] * x[size_t(col_idx_[size_t(i)])];
    y[size_t(r)] = acc;
  }
}

std::vector<double> SparseMatrix::apply_transpose(
    std::span<const double> x) const {
  if (x.size() != size_t(rows_))
    throw ValidationError("SparseMatrix::apply_transpose: size mismatch");
  std::vector<double> y(size_t(cols_), 0.0);
  for (int64_t r = 0; r < rows_; ++r)
    for (int64_t i = row_ptr_[size_t(r)]; i < row_ptr_[size_t(r) + 1]; ++i)
      y[size_t(col_idx_[size_t(i)])] += values_[size_t(i)] * x[size_t(r)];
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<int64_t> counts(size_t(cols_) + 1, 0);
  for (int64_t c : col_idx_) counts[size_t(c) + 1]++;
  for (size_t c = 0; c < size_t(cols_); ++c) counts[c + 1] += counts[c];
  std::vector<int64_t> row_ptr = counts;
  std::vector<int64_t> col_idx(values_.size());
  std::vector<double> values(values_.size());
  std::vector<int64_t> next(counts.begin(), counts.end() - 1);
  for (int64_t r = 0; r < rows_; ++r)
    for (int64_t i = row_ptr_[size_t(r)]; i < row_ptr_[size_t(r) + 1]; ++i) {
      int64_t pos = next[size_t(col_idx_[size_t(i)])]++;
      col_idx[size_t(pos)] = r;
      values[size_t(pos)] = values_[size_t(i)];
    }
  return SparseMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx),
                      std::move(values), description_ + "'");
}

SparseMatrix SparseMatrix::gram_impl(bool parallel) const {
  // Row i of A'A accumulates, for every row k of A with A[k,i] != 0, the
  // scaled row k. The transpose gives the list of such k per output row.
  const SparseMatrix at = transpose();
  const int64_t n = cols_;
  std::vector<std::vector<int64_t>> out_cols(static_cast<size_t>(n));
  std::vector<std::vector<double>> out_vals(static_cast<size_t>(n));
#pragma omp parallel if (parallel)
  {
    std::vector<double> acc(size_t(n), 0.0);
    std::vector<int64_t> touched;
#pragma omp for schedule(dynamic, 64)
    for (int64_t i = 0; i < n; ++i) {
      touched.clear();
      for (int64_t a = at.row_ptr()[size_t(i)]; a < at.row_ptr()[size_t(i) + 1];
           ++a) {
        const int64_t k = at.col_idx()[size_t(a)];
        const double v = at.values()[size_t(a)];
        for (int64_t b = row_ptr_[size_t(k)]; b < row_ptr_[size_t(k) + 1]; ++b) {
          const int64_t j = col_idx_[size_t(b)];
          if (acc[size_t(j)] == 0.0 &&
              std::find(touched.begin(), touched.end(), j) == touched.end())
            touched.push_back(j);
          acc[size_t(j)] += v * values_[size_t(b)];
        }
      }
      std::sort(touched.begin(), touched.end());
      for (int64_t j : touched) {
        out_cols[size_t(i)].push_back(j);
        out_vals[size_t(i)].push_back(acc[size_t(j)]);
        acc[size_t(j)] = 0.0;
      }
    }
  }
  std::vector<int64_t> row_ptr(size_t(n) + 1, 0);
  for (int64_t i = 0; i < n; ++i)
    row_ptr[size_t(i) + 1] = row_ptr[size_t(i)] + int64_t(out_cols[size_t(i)].size());
  std::vector<int64_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(size_t(row_ptr[size_t(n)]));
  values.reserve(size_t(row_ptr[size_t(n)]));
  for (int64_t i = 0; i < n; ++i) {
    col_idx.insert(col_idx.end(), out_cols[size_t(i)].begin(),
                   out_cols[size_t(i)].end());
    values.insert(values.end(), out_vals[size_t(i)].begin(),
                  out_vals[size_t(i)].end());
  }
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                      std::move(values), description_ + "'*" + description_);
}

SparseMatrix SparseMatrix::gram() const { return gram_impl(true); }
SparseMatrix SparseMatrix::gram_serial() const { return gram_impl(false); }

SparseMatrix SparseMatrix::add_scaled(const SparseMatrix& other,
                                      double scale) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw ValidationError("SparseMatrix::add_scaled: shape mismatch");
  std::vector<int64_t> row_ptr(size_t(rows_) + 1, 0);
  std::vector<int64_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(values_.size() + other.values_.size());
  values.reserve(values_.size() + other.values_.size());
  for (int64_t r = 0; r < rows_; ++r) {
    int64_t a = row_ptr_[size_t(r)], ae = row_ptr_[size_t(r) + 1];
    int64_t b = other.row_ptr_[size_t(r)], be = other.row_ptr_[size_t(r) + 1];
    while (a < ae || b < be) {
      int64_t ca = a < ae ? col_idx_[size_t(a)] : cols_;
      int64_t cb = b < be ? other.col_idx_[size_t(b)] : cols_;
      if (ca < cb) {
        col_idx.push_back(ca);
        values.push_back(values_[size_t(a++)]);
      } else if (cb < ca) {
        col_idx.push_back(cb);
        values.push_back(scale * other.values_[size_t(b++)]);
      } else {
        col_idx.push_back(ca);
        values.push_back(values_[size_t(a++)] + scale * other.values_[size_t(b++)]);
      }
    }
    row_ptr[size_t(r) + 1] = int64_t(col_idx.size());
  }
  return SparseMatrix(rows_, cols_, std::move(row_ptr), std::move(col_idx),
                      std::move(values), description_);
}

SparseMatrix SparseMatrix::scaled(double scale) const {
  SparseMatrix out = *this;
  for (double& v : out.values_) v *= scale;
  return out;
}

double SparseMatrix::symmetry_error() const {
  if (rows_ != cols_) throw ValidationError("symmetry_error: not square");
  const SparseMatrix t = transpose();
  double err = 0.0;
  for (int64_t r = 0; r < rows_; ++r) {
    int64_t a = row_ptr_[size_t(r)], ae = row_ptr_[size_t(r) + 1];
    int64_t b = t.row_ptr_[size_t(r)], be = t.row_ptr_[size_t(r) + 1];
    while (a < ae || b < be) {
      int64_t ca = a < ae ? col_idx_[size_t(a)] : cols_;
      int64_t cb = b < be ? t.col_idx_[size_t(b)] : cols_;
      if (ca < cb)
        err = std::max(err, std::abs(values_[size_t(a++)]));
      else if (cb < ca)
        err = std::max(err, std::abs(t.values_[size_t(b++)]));
      else
        err = std::max(err,
                       std::abs(values_[size_t(a++)] - t.values_[size_t(b++)]));
    }
  }
  return err;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(size_t(rows_) * size_t(cols_), 0.0);
  for (int64_t r = 0; r < rows_; ++r)
    for (int64_t i = row_ptr_[size_t(r)]; i < row_ptr_[size_t(r) + 1]; ++i)
      d[size_t(r) * size_t(cols_) + size_t(col_idx_[size_t(i)])] =
          values_[size_t(i)];
  return d;
}

void save_matrix_market(const SparseMatrix& m,
                        const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("MatrixMarket: cannot write " + path.string());
  os << "%%MatrixMarket matrix coordinate real general\n";
  if (!m.description().empty()) os << "% " << m.description() << "\n";
  os << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
  os.precision(17);
  for (int64_t r = 0; r < m.rows(); ++r)
    for (int64_t i = m.row_ptr()[size_t(r)]; i < m.row_ptr()[size_t(r) + 1]; ++i)
      os << r + 1 << " " << m.col_idx()[size_t(i)] + 1 << " "
         << m.values()[size_t(i)] << "\n";
}

SparseMatrix load_matrix_market(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("MatrixMarket: cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) ||
      line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0)
    throw FormatError("MatrixMarket: bad banner");
  while (std::getline(is, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream hdr(line);
  int64_t rows, cols, nnz;
  if (!(hdr >> rows >> cols >> nnz))
    throw FormatError("MatrixMarket: bad size line");
  SparseOperator op(rows, cols, path.filename().string());
  op.reserve(size_t(nnz));
  for (int64_t i = 0; i < nnz; ++i) {
    int64_t r, c;
    double v;
    if (!(is >> r >> c >> v)) throw FormatError("MatrixMarket: truncated entries");
    op.add(r - 1, c - 1, v);
  }
  return op.finalize();
}

}  // namespace lriid
