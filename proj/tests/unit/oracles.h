#pragma once

// Independent brute-force references for the application tests.

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "acsolve/apps.h"
#include "acsolve/sampling.h"

namespace acsolve::testing {

// Min over permutations of (1/d) sum_i C(i, sigma(i)): the optimal cost with
// uniform marginals, by Birkhoff's theorem.
inline double BruteForceAssignment(const Mat& C) {
  const int d = static_cast<int>(C.rows());
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0;
    for (int i = 0; i < d; ++i) s += C(i, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / d;
}

// Min mean weight over all simple directed cycles, by depth-first enumeration
// of cycles rooted at their smallest vertex. Infinity when acyclic.
inline double EnumerateMinMeanCycle(const GraphInstance& g) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> on_path(g.vertices, false);
  std::function<void(int, int, double, int)> dfs = [&](int root, int u,
                                                        double total, int len) {
    for (const GraphEdge& e : g.edges) {
      if (e.u != u || e.v < root) continue;
      if (e.v == root) {
        best = std::min(best, (total + e.w) / (len + 1));
      } else if (!on_path[e.v]) {
        on_path[e.v] = true;
        dfs(root, e.v, total + e.w, len + 1);
        on_path[e.v] = false;
      }
    }
  };
  for (int s = 0; s < g.vertices; ++s) {
    on_path[s] = true;
    dfs(s, s, 0.0, 0);
    on_path[s] = false;
  }
  return best;
}

// Random strongly connected digraph: a Hamiltonian cycle on a random vertex
// order plus extra random edges, weights uniform in [0, 1].
inline GraphInstance RandomStronglyConnected(Rng& rng, int n, int extra) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  std::uniform_int_distribution<int> v(0, n - 1);
  std::vector<GraphEdge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({order[i], order[(i + 1) % n], w(rng)});
  for (int k = 0; k < extra; ++k) {
    int a = v(rng), b = v(rng);
    if (a != b) edges.push_back({a, b, w(rng)});
  }
  return GraphInstance::Make(n, edges);
}

}  // namespace acsolve::testing
