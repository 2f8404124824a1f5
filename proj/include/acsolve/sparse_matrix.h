#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace acsolve {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Entry {
  int row;
  int col;
  double value;
};

// Compressed n x d matrix that also stores its entrywise absolute value, so
// the four products A y, A^T x, |A| y, |A|^T v cost one pass each.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  // Duplicate coordinates are summed; entries that end up zero are dropped.
  // Throws std::invalid_argument on out-of-range indices or non-finite values.
  SparseMatrix(int rows, int cols, const std::vector<Entry>& entries);

  static SparseMatrix FromDense(const Mat& dense);
  static SparseMatrix Identity(int n);

  int rows() const { return static_cast<int>(a_.rows()); }
  int cols() const { return static_cast<int>(a_.cols()); }
  long nnz() const { return a_.nonZeros(); }

  Vec times(const Vec& y) const;
  Vec transpose_times(const Vec& x) const;
  Vec abs_times(const Vec& y) const;
  Vec abs_transpose_times(const Vec& v) const;

  SparseMatrix scaled(double factor) const;
  SparseMatrix transposed() const;
  // Keeps only the listed rows, in the given order.
  SparseMatrix select_rows(const std::vector<int>& rows) const;
  // True for rows with no stored entries.
  std::vector<bool> empty_rows() const;

  Mat to_dense() const;
  std::vector<Entry> entries() const;

  bool operator==(const SparseMatrix& other) const;

 private:
  explicit SparseMatrix(Eigen::SparseMatrix<double, Eigen::RowMajor> a);

  Eigen::SparseMatrix<double, Eigen::RowMajor> a_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> abs_;
};

}  // namespace acsolve
