#pragma once

#include <vector>

#include "acsolve/core.h"

namespace acsolve {

// argmin over the box of <v, x> + <q, x^2>: clip(-v / 2q) coordinatewise,
// and -sign(v_i) where q_i = 0. Requires q >= 0.
Vec best_response_x(const Vec& v, const Vec& q);

// min over the box of <v, x> + <q, x^2>, summed per coordinate as
// -v^2 / (4q) when |v| <= 2q and q - |v| otherwise.
double ell_v(const Vec& v, const Vec& q);

struct SubproblemResult {
  Vec x;
  Vec y;
  double objective = 0.0;
  // f(y_k) for k = 0, 1, ..., starting at the uniform point.
  std::vector<double> objectives;
  int iterations = 0;
  bool converged = false;
};

// f(y) = min over x of <vx, x> + <vy, y> + r(x, y) for r with weight alpha.
double subproblem_objective(const SparseMatrix& A, const Vec& vx,
                            const Vec& vy, double alpha, const Vec& y);

// Subgradient of f at y > 0: vy + |A|^T x_br(y)^2 + alpha (log y + 1).
Vec subproblem_subgradient(const SparseMatrix& A, const Vec& vx, const Vec& vy,
                           double alpha, const Vec& y);

// Minimizes <vx, x> + <vy, y> + r(x, y) over box x simplex by mirror descent
// on f with weight alpha on KL, which is the relative smoothness constant of
// f. Relative strong convexity is alpha - 1/2, so each step contracts the
// objective gap by 1 - (alpha - 1/2) / alpha (one half at alpha = 2).
// Stops when the objective decrease falls to tol or below; after max_iters
// steps without that it returns with converged = false.
SubproblemResult minimize_subproblem(const SparseMatrix& A, const Vec& vx,
                                     const Vec& vy, double alpha, double tol,
                                     int max_iters = 200);

}  // namespace acsolve
