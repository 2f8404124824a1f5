#include "acsolve/apps.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace acsolve {

namespace {

void RequireSimplex(const Vec& v, int d, const char* name) {
  if (v.size() != d) {
    throw std::invalid_argument(std::string(name) + " must have length " +
                                std::to_string(d));
  }
  if (!v.allFinite() || v.minCoeff() < 0.0 || std::abs(v.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(name) +
                                " must be a probability vector");
  }
}

// Solves a simplex-min game through its box-simplex form; the box-simplex
// value is the negated simplex-min value.
SolveResult SolveGame(const SimplexMinGame& game, double epsilon,
                      SolverParams params) {
  params.epsilon = epsilon;
  return solve(dualize(game), params);
}

Vec EdgeWeights(const GraphInstance& g) {
  Vec w(g.m());
  for (int e = 0; e < g.m(); ++e) w[e] = g.edges[e].w;
  return w;
}

// Dense R B W^-1, K x m.
Mat RBWinv(const GraphInstance& g, const CostApproximator& R) {
  if (R.R.cols() != g.vertices) {
    throw std::invalid_argument("cost approximator has " +
                                std::to_string(R.R.cols()) +
                                " columns but the graph has " +
                                std::to_string(g.vertices) + " vertices");
  }
  Mat out = R.R.to_dense() * g.incidence().to_dense();
  for (int e = 0; e < g.m(); ++e) {
    if (!(g.edges[e].w > 0.0)) {
      throw std::invalid_argument("flow problems need positive edge weights");
    }
    out.col(e) /= g.edges[e].w;
  }
  return out;
}

void RequireFlowArgs(const GraphInstance& g, const Vec& demand, double t) {
  if (demand.size() != g.vertices) {
    throw std::invalid_argument("demand must have one entry per vertex");
  }
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
}

}  // namespace

OtInstance OtInstance::Make(Mat C, Vec p, Vec q) {
  if (C.rows() != C.cols() || C.rows() < 1) {
    throw std::invalid_argument("cost matrix must be square and nonempty");
  }
  if (!C.allFinite() || C.minCoeff() < 0.0) {
    throw std::invalid_argument("cost matrix must be finite and nonnegative");
  }
  const int d = static_cast<int>(C.rows());
  RequireSimplex(p, d, "p");
  RequireSimplex(q, d, "q");
  return {std::move(C), std::move(p), std::move(q)};
}

SimplexMinGame ot_game(const OtInstance& ot) {
  const int d = ot.d();
  const double cmax = ot.C.maxCoeff();
  std::vector<Entry> entries;
  Vec p(d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const int k = i * d + j;
      p[k] = ot.C(i, j);
      entries.push_back({i, k, 2.0 * cmax});
      entries.push_back({d + j, k, 2.0 * cmax});
    }
  }
  Vec r(2 * d);
  r << ot.p, ot.q;
  return {SparseMatrix(2 * d, d * d, entries), p, -2.0 * cmax * r};
}

BoxSimplexInstance ot_to_boxsimplex(const OtInstance& ot) {
  return dualize(ot_game(ot));
}

Mat ot_plan_from_simplex(const Vec& y, int d) {
  if (y.size() != static_cast<long>(d) * d) {
    throw std::invalid_argument("simplex point has the wrong length");
  }
  Mat X(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = y[i * d + j];
  }
  return X;
}

Mat round_transport_plan(const Mat& X, const Vec& p, const Vec& q) {
  const int d = static_cast<int>(X.rows());
  Mat F = X.cwiseMax(0.0);
  for (int i = 0; i < d; ++i) {
    const double r = F.row(i).sum();
    if (r > p[i]) F.row(i) *= p[i] / r;
  }
  for (int j = 0; j < d; ++j) {
    const double c = F.col(j).sum();
    if (c > q[j]) F.col(j) *= q[j] / c;
  }
  const Vec er = (p - F.rowwise().sum()).cwiseMax(0.0);
  const Vec ec = (q - F.colwise().sum().transpose()).cwiseMax(0.0);
  const double mass = er.sum();
  if (mass > 0.0) F += er * ec.transpose() / mass;
  return F;
}

OtResult solve_ot(const OtInstance& ot, double epsilon, SolverParams params) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const int d = ot.d();
  OtResult res;
  res.solve = SolveGame(ot_game(ot), epsilon, params);
  res.raw_plan = ot_plan_from_simplex(res.solve.y, d);
  res.marginal_violation =
      (res.raw_plan.rowwise().sum() - ot.p).lpNorm<1>() +
      (res.raw_plan.colwise().sum().transpose() - ot.q).lpNorm<1>();
  res.plan = round_transport_plan(res.raw_plan, ot.p, ot.q);
  res.cost = ot.C.cwiseProduct(res.plan).sum();
  return res;
}

GraphInstance GraphInstance::Make(int vertices, std::vector<GraphEdge> edges) {
  if (vertices < 1) throw std::invalid_argument("graph needs a vertex");
  for (size_t e = 0; e < edges.size(); ++e) {
    const GraphEdge& ed = edges[e];
    if (ed.u < 0 || ed.u >= vertices || ed.v < 0 || ed.v >= vertices) {
      throw std::invalid_argument("edge " + std::to_string(e) +
                                  " has a vertex out of range");
    }
    if (!std::isfinite(ed.w) || ed.w < 0.0) {
      throw std::invalid_argument("edge " + std::to_string(e) +
                                  " has a negative or non-finite weight");
    }
  }
  return {vertices, std::move(edges)};
}

SparseMatrix GraphInstance::incidence() const {
  std::vector<Entry> entries;
  for (int e = 0; e < m(); ++e) {
    if (edges[e].u == edges[e].v) continue;
    entries.push_back({edges[e].u, e, -1.0});
    entries.push_back({edges[e].v, e, 1.0});
  }
  return SparseMatrix(vertices, m(), entries);
}

double GraphInstance::w_max() const {
  double w = 0.0;
  for (const GraphEdge& e : edges) w = std::max(w, e.w);
  return w;
}

int GraphInstance::diameter() const {
  std::vector<std::vector<int>> out(vertices);
  for (const GraphEdge& e : edges) out[e.u].push_back(e.v);
  int dia = 0;
  for (int s = 0; s < vertices; ++s) {
    std::vector<int> dist(vertices, -1);
    std::queue<int> bfs;
    dist[s] = 0;
    bfs.push(s);
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop();
      for (int v : out[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          bfs.push(v);
        }
      }
    }
    for (int v = 0; v < vertices; ++v) {
      if (dist[v] < 0) return -1;
      dia = std::max(dia, dist[v]);
    }
  }
  return dia;
}

bool GraphInstance::has_cycle() const {
  // Kahn's algorithm: a cycle exists iff some vertex is never freed.
  std::vector<int> indeg(vertices, 0);
  std::vector<std::vector<int>> out(vertices);
  for (const GraphEdge& e : edges) {
    if (e.u == e.v) return true;
    out[e.u].push_back(e.v);
    ++indeg[e.v];
  }
  std::vector<int> ready;
  for (int v = 0; v < vertices; ++v) {
    if (indeg[v] == 0) ready.push_back(v);
  }
  int freed = 0;
  while (!ready.empty()) {
    int u = ready.back();
    ready.pop_back();
    ++freed;
    for (int v : out[u]) {
      if (--indeg[v] == 0) ready.push_back(v);
    }
  }
  return freed < vertices;
}

SimplexMinGame mmc_game(const GraphInstance& g) {
  const double scale = 3.0 * std::max(g.diameter(), 0) * g.w_max();
  return {g.incidence().scaled(scale), EdgeWeights(g), Vec::Zero(g.vertices)};
}

std::optional<std::vector<int>> extract_cycle(const GraphInstance& g,
                                              const Vec& x) {
  const int m = g.m();
  if (x.size() != m) throw std::invalid_argument("x must have one entry per edge");
  if (m == 0) return std::nullopt;
  const double threshold = 1.0 / (2.0 * m);
  std::vector<int> best_out(g.vertices, -1);
  for (int e = 0; e < m; ++e) {
    if (x[e] < threshold) continue;
    int& b = best_out[g.edges[e].u];
    if (b < 0 || x[e] > x[b]) b = e;
  }
  int e = 0;
  x.maxCoeff(&e);
  if (x[e] < threshold) return std::nullopt;
  std::vector<int> verts{g.edges[e].u};
  std::vector<int> path;
  while (true) {
    path.push_back(e);
    const int h = g.edges[e].v;
    auto it = std::find(verts.begin(), verts.end(), h);
    if (it != verts.end()) {
      return std::vector<int>(path.begin() + (it - verts.begin()), path.end());
    }
    verts.push_back(h);
    e = best_out[h];
    if (e < 0) return std::nullopt;
  }
}

double cycle_mean(const GraphInstance& g, const std::vector<int>& cycle) {
  if (cycle.empty()) throw std::invalid_argument("empty cycle");
  double total = 0.0;
  for (int e : cycle) total += g.edges[e].w;
  return total / static_cast<double>(cycle.size());
}

MmcResult solve_mmc(const GraphInstance& g, double epsilon,
                    SolverParams params) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!g.has_cycle()) throw std::invalid_argument("graph has no cycle");
  if (g.diameter() < 0) {
    throw std::invalid_argument("graph is not strongly connected");
  }
  const SimplexMinGame game = mmc_game(g);
  MmcResult res;
  res.scale = 3.0 * g.diameter() * g.w_max();
  res.solve = SolveGame(game, epsilon * (res.scale > 0.0 ? res.scale : 1.0),
                        params);
  const Vec& y = res.solve.x;  // vertex potentials
  res.x = res.solve.y;
  res.value = game_value(game, y, res.x);
  res.upper = game.p.dot(res.x) + game.M.times(res.x).lpNorm<1>();
  res.lower = (game.p + game.M.transpose_times(y)).minCoeff();
  res.cycle = extract_cycle(g, res.x);
  if (res.cycle) res.cycle_mean = cycle_mean(g, *res.cycle);
  return res;
}

SimplexMinGame l1_flow_game(const GraphInstance& g, const CostApproximator& R,
                            const Vec& demand, double t) {
  RequireFlowArgs(g, demand, t);
  const Mat rbw = RBWinv(g, R);
  Mat M(rbw.rows(), 2 * g.m());
  M << t * rbw, -t * rbw;
  return {SparseMatrix::FromDense(M), Vec::Zero(2 * g.m()),
          -R.R.times(demand)};
}

FlowResult solve_l1_flow_given_R(const GraphInstance& g,
                                 const CostApproximator& R, const Vec& demand,
                                 double t, double epsilon,
                                 SolverParams params) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const SimplexMinGame game = l1_flow_game(g, R, demand, t);
  FlowResult res;
  res.solve = SolveGame(game, epsilon * t, params);
  const int m = g.m();
  res.flow = Vec(m);
  for (int e = 0; e < m; ++e) {
    res.flow[e] = t * (res.solve.y[e] - res.solve.y[m + e]) / g.edges[e].w;
  }
  res.value = R.R.times(g.incidence().times(res.flow) - demand).lpNorm<1>();
  res.gap = res.solve.gap;
  return res;
}

BoxSimplexInstance maxflow_game(const GraphInstance& g,
                                const CostApproximator& R, const Vec& demand,
                                double t) {
  RequireFlowArgs(g, demand, t);
  const Mat rbw = RBWinv(g, R);
  Mat A(g.m(), 2 * rbw.rows());
  A << t * rbw.transpose(), -t * rbw.transpose();
  const Vec rd = R.R.times(demand);
  Vec b(2 * rd.size());
  b << rd, -rd;
  return BoxSimplexInstance::Make(SparseMatrix::FromDense(A), b,
                                  Vec::Zero(g.m()));
}

FlowResult solve_maxflow_given_R(const GraphInstance& g,
                                 const CostApproximator& R, const Vec& demand,
                                 double t, double epsilon,
                                 SolverParams params) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const BoxSimplexInstance inst = maxflow_game(g, R, demand, t);
  FlowResult res;
  params.epsilon = epsilon * t;
  res.solve = solve(inst, params);
  res.flow = Vec(g.m());
  for (int e = 0; e < g.m(); ++e) {
    res.flow[e] = t * res.solve.x[e] / g.edges[e].w;
  }
  res.value = R.R.times(g.incidence().times(res.flow) - demand)
                  .lpNorm<Eigen::Infinity>();
  res.gap = res.solve.gap;
  return res;
}

}  // namespace acsolve
