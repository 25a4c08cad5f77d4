#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "omplab/errors.hpp"

namespace omplab {

using Vector = std::vector<double>;

inline void require_finite(const Vector& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw ContractViolation(std::string(what) + ": entries must be finite");
    }
  }
}

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(const Vector& v) { return std::sqrt(dot(v, v)); }

/// Strictly increasing set of column/coordinate indices.
class IndexSet {
 public:
  IndexSet() = default;

  explicit IndexSet(std::vector<int> sorted_unique) : indices_(std::move(sorted_unique)) {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (indices_[i] < 0) throw ContractViolation("IndexSet: negative index");
      if (i > 0 && indices_[i] <= indices_[i - 1]) {
        throw ContractViolation("IndexSet: indices must be strictly increasing");
      }
    }
  }

  static IndexSet from_unsorted(std::vector<int> idx) {
    std::sort(idx.begin(), idx.end());
    return IndexSet(std::move(idx));
  }

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  int operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<int>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  bool contains(int j) const {
    return std::binary_search(indices_.begin(), indices_.end(), j);
  }

  bool operator==(const IndexSet& other) const { return indices_ == other.indices_; }

 private:
  std::vector<int> indices_;
};

/// Dense real matrix, row-major storage.
class DenseMatrix {
 public:
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    check_dims(rows, cols);
    data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  }

  DenseMatrix(int rows, int cols, Vector entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    check_dims(rows, cols);
    if (data_.size() != static_cast<std::size_t>(rows) * cols) {
      throw ContractViolation("DenseMatrix: entry count must equal rows*cols");
    }
    require_finite(data_, "DenseMatrix");
  }

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  const Vector& entries() const { return data_; }

  Vector column(int j) const {
    if (j < 0 || j >= cols_) throw ContractViolation("DenseMatrix::column: index out of range");
    Vector c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  /// Submatrix formed by the given columns, in index order.
  DenseMatrix columns(const IndexSet& cols) const {
    for (int j : cols) {
      if (j >= cols_) throw ContractViolation("DenseMatrix::columns: index out of range");
    }
    DenseMatrix sub(rows_, static_cast<int>(cols.size()));
    for (int i = 0; i < rows_; ++i) {
      for (std::size_t t = 0; t < cols.size(); ++t) sub(i, static_cast<int>(t)) = (*this)(i, cols[t]);
    }
    return sub;
  }

  bool operator==(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  static void check_dims(int rows, int cols) {
    if (rows < 1 || cols < 1) throw ContractViolation("DenseMatrix: rows and cols must be >= 1");
  }

  int rows_ = 0;
  int cols_ = 0;
  Vector data_;
};

}  // namespace omplab
