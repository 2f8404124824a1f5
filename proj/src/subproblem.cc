#include "acsolve/subproblem.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acsolve {

Vec best_response_x(const Vec& v, const Vec& q) {
  if (v.size() != q.size()) {
    throw std::invalid_argument("best_response_x: v and q differ in length");
  }
  Vec x(v.size());
  for (int i = 0; i < v.size(); ++i) {
    if (q[i] > 0.0) {
      x[i] = std::clamp(-v[i] / (2.0 * q[i]), -1.0, 1.0);
    } else {
      x[i] = v[i] > 0.0 ? -1.0 : (v[i] < 0.0 ? 1.0 : 0.0);
    }
  }
  return x;
}

double ell_v(const Vec& v, const Vec& q) {
  if (v.size() != q.size()) {
    throw std::invalid_argument("ell_v: v and q differ in length");
  }
  double total = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    double a = std::abs(v[i]);
    if (a <= 2.0 * q[i]) {
      if (q[i] > 0.0) total -= v[i] * v[i] / (4.0 * q[i]);
    } else {
      total += q[i] - a;
    }
  }
  return total;
}

double subproblem_objective(const SparseMatrix& A, const Vec& vx,
                            const Vec& vy, double alpha, const Vec& y) {
  return ell_v(vx, A.abs_times(y)) + vy.dot(y) + alpha * neg_entropy(y);
}

Vec subproblem_subgradient(const SparseMatrix& A, const Vec& vx, const Vec& vy,
                           double alpha, const Vec& y) {
  Vec x = best_response_x(vx, A.abs_times(y));
  Vec g = vy + A.abs_transpose_times(x.cwiseProduct(x));
  g.array() += alpha * (y.array().log() + 1.0);
  return g;
}

SubproblemResult minimize_subproblem(const SparseMatrix& A, const Vec& vx,
                                     const Vec& vy, double alpha, double tol,
                                     int max_iters) {
  if (!(alpha >= 0.5)) {
    throw std::invalid_argument("minimize_subproblem: alpha must be >= 1/2");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("minimize_subproblem: tol must be positive");
  }
  if (vx.size() != A.rows() || vy.size() != A.cols()) {
    throw std::invalid_argument("minimize_subproblem: dimension mismatch");
  }
  SubproblemResult res;
  Vec y = Vec::Constant(A.cols(), 1.0 / A.cols());
  double f = subproblem_objective(A, vx, vy, alpha, y);
  res.objectives.push_back(f);
  for (int k = 0; k < max_iters; ++k) {
    // The mirror step y <- argmin <df(y), u> + alpha KL(u || y) has the
    // alpha log y terms cancel, leaving a softmax of the forcing term.
    Vec x = best_response_x(vx, A.abs_times(y));
    Vec logits = -(vy + A.abs_transpose_times(x.cwiseProduct(x))) / alpha;
    y = SoftmaxFromLog(logits);
    double next = subproblem_objective(A, vx, vy, alpha, y);
    res.objectives.push_back(next);
    res.iterations = k + 1;
    double decrease = f - next;
    f = next;
    if (decrease <= tol) {
      res.converged = true;
      break;
    }
  }
  res.y = y;
  res.x = best_response_x(vx, A.abs_times(y));
  res.objective = f;
  return res;
}

}  // namespace acsolve
