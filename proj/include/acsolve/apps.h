#pragma once

#include <optional>
#include <vector>

#include "acsolve/boxsimplex.h"
#include "acsolve/core.h"

namespace acsolve {

// ---- Optimal transport ----

struct OtInstance {
  Mat C;  // d x d, nonnegative
  Vec p;
  Vec q;

  // Validates C >= 0 and that p, q lie on the simplex to 1e-9.
  static OtInstance Make(Mat C, Vec p, Vec q);
  int d() const { return static_cast<int>(C.rows()); }
};

// min over X in the simplex of size d^2, max over y in [-1, 1]^{2d}, of
//   <C, X> + 2 ||C||_max y^T (B X - r),  B X = [X 1; X^T 1],  r = [p; q].
// X is stored row-major: X(i, j) at index i d + j.
SimplexMinGame ot_game(const OtInstance& ot);
BoxSimplexInstance ot_to_boxsimplex(const OtInstance& ot);
Mat ot_plan_from_simplex(const Vec& y, int d);

// Scales rows down to p, then columns down to q, then adds the outer
// product of the remaining deficits. The result has marginals p and q.
Mat round_transport_plan(const Mat& X, const Vec& p, const Vec& q);

struct OtResult {
  Mat plan;          // rounded, feasible
  double cost = 0.0;
  Mat raw_plan;      // solver output before rounding
  double marginal_violation = 0.0;  // ||B X - r||_1 of the raw plan
  SolveResult solve;
};

// Solves the game to additive gap epsilon and rounds.
OtResult solve_ot(const OtInstance& ot, double epsilon,
                  SolverParams params = {});

// ---- Graphs ----

struct GraphEdge {
  int u;
  int v;
  double w;
};

struct GraphInstance {
  int vertices = 0;
  std::vector<GraphEdge> edges;

  // Validates vertex ranges and w >= 0.
  static GraphInstance Make(int vertices, std::vector<GraphEdge> edges);
  int m() const { return static_cast<int>(edges.size()); }
  // vertices x m, column e has -1 at the tail and +1 at the head (zero for a
  // self-loop), so (B f)_v is the net inflow at v.
  SparseMatrix incidence() const;
  double w_max() const;
  // Longest shortest directed path in edges; -1 when some vertex cannot
  // reach another.
  int diameter() const;
  bool has_cycle() const;
};

// ---- Min-mean cycle ----

// min over x in the edge simplex, max over y in [-1, 1]^vertices, of
//   w^T x + 3 dia w_max y^T B x.
SimplexMinGame mmc_game(const GraphInstance& g);

struct MmcResult {
  double value = 0.0;  // game value at the returned point
  double lower = 0.0;  // min over x of the payoff at the returned y
  double upper = 0.0;  // max over y of the payoff at the returned x
  double scale = 0.0;  // 3 dia w_max
  Vec x;               // fractional edge weights
  // Heuristic cycle read off the support of x, as edge indices in order.
  std::optional<std::vector<int>> cycle;
  double cycle_mean = 0.0;
  SolveResult solve;
};

// Solves to additive gap epsilon * scale. Throws std::invalid_argument with
// "graph has no cycle" or "graph is not strongly connected".
MmcResult solve_mmc(const GraphInstance& g, double epsilon,
                    SolverParams params = {});

// Threshold at 1/(2m), then follow the heaviest outgoing support edge from
// the heaviest edge until a vertex repeats.
std::optional<std::vector<int>> extract_cycle(const GraphInstance& g,
                                              const Vec& x);
double cycle_mean(const GraphInstance& g, const std::vector<int>& cycle);

// ---- Flows with a cost approximator ----

struct CostApproximator {
  SparseMatrix R;  // K x vertices
  double alpha = 1.0;
};

struct FlowResult {
  Vec flow;            // per edge, on the original scale
  double value = 0.0;  // the primal payoff at flow
  double gap = 0.0;
  SolveResult solve;
};

// min over f in the simplex of size 2m, max over y in [-1, 1]^K, of
//   t y^T A^T f - b^T y,  A = [W^-1 B^T R^T; -W^-1 B^T R^T],  b = R d.
// The flow is phi = t W^-1 (f+ - f-) and value = ||R (B phi - d)||_1.
SimplexMinGame l1_flow_game(const GraphInstance& g, const CostApproximator& R,
                            const Vec& demand, double t);
FlowResult solve_l1_flow_given_R(const GraphInstance& g,
                                 const CostApproximator& R, const Vec& demand,
                                 double t, double epsilon,
                                 SolverParams params = {});

// min over f in [-1, 1]^m, max over y in the simplex of size 2K, of
//   t y^T A f - b^T y,  A = [R B W^-1; -R B W^-1],  b = [R d; -R d].
// The flow is phi = t W^-1 f and value = ||R (B phi - d)||_inf.
BoxSimplexInstance maxflow_game(const GraphInstance& g,
                                const CostApproximator& R, const Vec& demand,
                                double t);
FlowResult solve_maxflow_given_R(const GraphInstance& g,
                                 const CostApproximator& R, const Vec& demand,
                                 double t, double epsilon,
                                 SolverParams params = {});

}  // namespace acsolve
