#include "acsolve/sparse_matrix.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace acsolve {

SparseMatrix::SparseMatrix(int rows, int cols,
                           const std::vector<Entry>& entries) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("matrix dimensions must be nonnegative");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(entries.size());
  for (const Entry& e : entries) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) {
      throw std::invalid_argument("entry (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) +
                                  ") outside a " + std::to_string(rows) +
                                  "x" + std::to_string(cols) + " matrix");
    }
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument("non-finite matrix entry");
    }
    triplets.emplace_back(e.row, e.col, e.value);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> a(rows, cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.prune(0.0);
  *this = SparseMatrix(std::move(a));
}

SparseMatrix::SparseMatrix(Eigen::SparseMatrix<double, Eigen::RowMajor> a)
    : a_(std::move(a)) {
  a_.makeCompressed();
  abs_ = a_.cwiseAbs();
  abs_.makeCompressed();
}

SparseMatrix SparseMatrix::FromDense(const Mat& dense) {
  std::vector<Entry> entries;
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) entries.push_back({i, j, dense(i, j)});
    }
  }
  return SparseMatrix(static_cast<int>(dense.rows()),
                      static_cast<int>(dense.cols()), entries);
}

SparseMatrix SparseMatrix::Identity(int n) {
  std::vector<Entry> entries;
  for (int i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
  return SparseMatrix(n, n, entries);
}

namespace {

void CheckSize(long got, long want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string("dimension mismatch in ") + what +
                                ": got " + std::to_string(got) +
                                ", expected " + std::to_string(want));
  }
}

}  // namespace

Vec SparseMatrix::times(const Vec& y) const {
  CheckSize(y.size(), a_.cols(), "A*y");
  return a_ * y;
}

Vec SparseMatrix::transpose_times(const Vec& x) const {
  CheckSize(x.size(), a_.rows(), "A^T*x");
  return a_.transpose() * x;
}

Vec SparseMatrix::abs_times(const Vec& y) const {
  CheckSize(y.size(), abs_.cols(), "|A|*y");
  return abs_ * y;
}

Vec SparseMatrix::abs_transpose_times(const Vec& v) const {
  CheckSize(v.size(), abs_.rows(), "|A|^T*v");
  return abs_.transpose() * v;
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  if (factor == 0.0) return SparseMatrix(rows(), cols(), {});
  Eigen::SparseMatrix<double, Eigen::RowMajor> a = a_ * factor;
  return SparseMatrix(std::move(a));
}

SparseMatrix SparseMatrix::transposed() const {
  Eigen::SparseMatrix<double, Eigen::RowMajor> t = a_.transpose();
  return SparseMatrix(std::move(t));
}

SparseMatrix SparseMatrix::select_rows(const std::vector<int>& rows) const {
  std::vector<Entry> picked;
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             a_, rows[r]);
         it; ++it) {
      picked.push_back({r, static_cast<int>(it.col()), it.value()});
    }
  }
  return SparseMatrix(static_cast<int>(rows.size()), cols(), picked);
}

std::vector<bool> SparseMatrix::empty_rows() const {
  std::vector<bool> empty(rows());
  for (int i = 0; i < rows(); ++i) {
    empty[i] = a_.outerIndexPtr()[i + 1] == a_.outerIndexPtr()[i];
  }
  return empty;
}

Mat SparseMatrix::to_dense() const { return Mat(a_); }

std::vector<Entry> SparseMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(a_.nonZeros());
  for (int i = 0; i < a_.outerSize(); ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a_, i);
         it; ++it) {
      out.push_back({i, static_cast<int>(it.col()), it.value()});
    }
  }
  return out;
}

bool SparseMatrix::operator==(const SparseMatrix& other) const {
  if (rows() != other.rows() || cols() != other.cols()) return false;
  std::vector<Entry> mine = entries();
  std::vector<Entry> theirs = other.entries();
  if (mine.size() != theirs.size()) return false;
  for (size_t k = 0; k < mine.size(); ++k) {
    if (mine[k].row != theirs[k].row || mine[k].col != theirs[k].col ||
        mine[k].value != theirs[k].value) {
      return false;
    }
  }
  return true;
}

}  // namespace acsolve
