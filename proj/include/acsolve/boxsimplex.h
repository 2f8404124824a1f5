#pragma once

#include <vector>

#include "acsolve/core.h"

namespace acsolve {

// Gradient step: x* = x_br(y), a KL prox step on y with weight beta, then
// x' = x_br(y'), where x_br(u) = best response to v^x - grad_x r(z) at
// curvature |A|u. Satisfies
//   <v, z' - u> <= V^{alpha+beta}_z(u) - V^alpha_{z'}(u) - V^alpha_z(z').
PrimalDualPoint grad_step_oracle(const SparseMatrix& A,
                                 const PrimalDualPoint& z, const Vec& vx,
                                 const Vec& vy, double alpha, double beta);

struct XgradStep {
  PrimalDualPoint z_plus;
  Vec logybar_plus;
};

// Extragradient step with auxiliary dual point ybar (log-weights). Both y+
// and ybar+ are KL prox steps centered at ybar; they differ in which box
// point enters grad_y r. Satisfies
//   <v, z+ - u> <= V^alpha_z(u) - V^alpha_{z+}(u) - V^alpha_z(z+)
//                  + V^{beta h}_{ybar}(u^y) - V^{beta h}_{ybar+}(u^y).
XgradStep xgrad_step_oracle(const SparseMatrix& A, const PrimalDualPoint& z,
                            const Vec& vx, const Vec& vy, const Vec& logybar,
                            double alpha, double beta);

struct GapRecord {
  long iteration;
  double gap;
  double seconds;
};
using GapTrace = std::vector<GapRecord>;

// Algorithm state between iterations.
struct OracleState {
  PrimalDualPoint z;
  Vec logybar;
  Vec sum_x;  // compensated sums of the (x', y') iterates
  Vec sum_y;
  long iteration = 0;
  long T = 0;
};

struct SolveResult {
  Vec x;
  Vec y;
  GapTrace trace;
  double gap = 0.0;
  double value = 0.0;  // f(x, y) on the original scale
  double L = 0.0;
  long T = 0;           // iteration bound
  long iterations = 0;  // iterations actually run
  bool early_exit = false;
  // Sparse products with A, A^T, |A|, |A|^T per iteration.
  double products_per_iteration = 0.0;
};

// ceil(2 (1 + (alpha + beta + gamma) ln d) L / (eta eps)); with the default
// parameters this is ceil(6 (8 ln d + 1) L / eps).
long iteration_bound(int d, double L, double epsilon,
                     const SolverParams& params = {});

// Extragradient method with the area-convex regularizer. Returns the average
// of the gradient-step iterates with an exact duality gap <= epsilon.
SolveResult solve(const BoxSimplexInstance& inst, const SolverParams& params);

}  // namespace acsolve
