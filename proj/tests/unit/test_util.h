#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "acsolve/core.h"

namespace acsolve::testing {

// Brute-force duality gap on a dense matrix: the inner max ranges over the
// simplex vertices and the inner min over all 2^n box vertices.
inline double BruteForceGap(const Mat& A, const Vec& b, const Vec& c,
                            const Vec& x, const Vec& y) {
  const int n = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  auto f = [&](const Vec& xx, const Vec& yy) {
    return xx.dot(A * yy) - b.dot(yy) + c.dot(xx);
  };
  double best_y = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < d; ++j) {
    best_y = std::max(best_y, f(x, Vec::Unit(d, j)));
  }
  double best_x = std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << n); ++mask) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    best_x = std::min(best_x, f(v, y));
  }
  return best_y - best_x;
}

// Dense reference regularizer, written out from its definition.
inline double DenseRegularizer(const Mat& A, double alpha, const Vec& x,
                               const Vec& y) {
  double v = 0.0;
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) v += std::abs(A(i, j)) * y[j] * x[i] * x[i];
  }
  for (int j = 0; j < y.size(); ++j) {
    if (y[j] > 0) v += alpha * y[j] * std::log(y[j]);
  }
  return v;
}

}  // namespace acsolve::testing
