#include "acsolve/boxsimplex.h"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "acsolve/subproblem.h"

namespace acsolve {

namespace {

// |A| y and |A|^T x^2 at the current point; the solver carries them from the
// extragradient step into the next gradient step.
struct Curvature {
  Vec abs_y;
  Vec abs_t_x2;
};

Curvature CurvatureAt(const SparseMatrix& A, const Vec& x, const Vec& y) {
  return {A.abs_times(y), A.abs_transpose_times(x.cwiseProduct(x))};
}

Vec NormalizeLog(const Vec& logw) { return logw.array() - LogSumExp(logw); }

PrimalDualPoint GradStep(const SparseMatrix& A, const PrimalDualPoint& z,
                         const Curvature& cz, const Vec& vx, const Vec& vy,
                         double beta, long& products) {
  const Vec wx = vx - 2.0 * z.x.cwiseProduct(cz.abs_y);
  const Vec xstar = best_response_x(wx, cz.abs_y);
  Vec logyp = z.normalized_logy() -
              (vy + A.abs_transpose_times(xstar.cwiseProduct(xstar)) -
               cz.abs_t_x2) /
                  beta;
  logyp = NormalizeLog(logyp);
  Vec xp = best_response_x(wx, A.abs_times(logyp.array().exp().matrix()));
  products += 2;
  return {xp, logyp};
}

XgradStep XgradStepImpl(const SparseMatrix& A, const PrimalDualPoint& z,
                        const Curvature& cz, const Vec& vx, const Vec& vy,
                        const Vec& logybar, double alpha, double beta,
                        Curvature& next, long& products) {
  const Vec wx = vx - 2.0 * z.x.cwiseProduct(cz.abs_y);
  const Vec ly = z.normalized_logy();
  const Vec lybar = NormalizeLog(logybar);
  const Vec xbar = best_response_x(wx, A.abs_times(lybar.array().exp().matrix()));
  Vec lyplus =
      lybar - (vy + A.abs_transpose_times(xbar.cwiseProduct(xbar)) +
               alpha * lybar - cz.abs_t_x2 - alpha * ly) /
                  beta;
  lyplus = NormalizeLog(lyplus);
  next.abs_y = A.abs_times(lyplus.array().exp().matrix());
  Vec xplus = best_response_x(wx, next.abs_y);
  next.abs_t_x2 = A.abs_transpose_times(xplus.cwiseProduct(xplus));
  Vec lybarplus =
      lybar - (vy + next.abs_t_x2 + alpha * lyplus - cz.abs_t_x2 - alpha * ly) /
                  beta;
  products += 4;
  return {{xplus, lyplus}, NormalizeLog(lybarplus)};
}

void CheckOracleArgs(const SparseMatrix& A, const PrimalDualPoint& z,
                     const Vec& vx, const Vec& vy, double alpha, double beta) {
  if (!(beta >= alpha && alpha >= 0.5)) {
    throw std::invalid_argument("oracle requires beta >= alpha >= 1/2");
  }
  if (z.x.size() != A.rows() || z.logy.size() != A.cols() ||
      vx.size() != A.rows() || vy.size() != A.cols()) {
    throw std::invalid_argument("oracle: dimension mismatch");
  }
}

// Kahan-compensated running sum.
struct CompensatedSum {
  Vec sum;
  Vec comp;
  explicit CompensatedSum(long n) : sum(Vec::Zero(n)), comp(Vec::Zero(n)) {}
  void add(const Vec& v) {
    for (long i = 0; i < v.size(); ++i) {
      double y = v[i] - comp[i];
      double t = sum[i] + y;
      comp[i] = (t - sum[i]) - y;
      sum[i] = t;
    }
  }
};

SolveResult DirectSolve(const BoxSimplexInstance& inst) {
  SolveResult res;
  res.x = Vec(inst.n());
  for (int i = 0; i < inst.n(); ++i) {
    double c = inst.c[i];
    res.x[i] = c > 0.0 ? -1.0 : (c < 0.0 ? 1.0 : 0.0);
  }
  int jmin = 0;
  inst.b.minCoeff(&jmin);
  res.y = Vec::Zero(inst.d());
  res.y[jmin] = 1.0;
  res.gap = duality_gap(inst, res.x, res.y);
  res.value = game_value(inst, res.x, res.y);
  res.trace.push_back({0, res.gap, 0.0});
  return res;
}

}  // namespace

PrimalDualPoint grad_step_oracle(const SparseMatrix& A,
                                 const PrimalDualPoint& z, const Vec& vx,
                                 const Vec& vy, double alpha, double beta) {
  CheckOracleArgs(A, z, vx, vy, alpha, beta);
  long products = 0;
  return GradStep(A, z, CurvatureAt(A, z.x, z.y()), vx, vy, beta, products);
}

XgradStep xgrad_step_oracle(const SparseMatrix& A, const PrimalDualPoint& z,
                            const Vec& vx, const Vec& vy, const Vec& logybar,
                            double alpha, double beta) {
  CheckOracleArgs(A, z, vx, vy, alpha, beta);
  if (logybar.size() != A.cols()) {
    throw std::invalid_argument("xgrad_step_oracle: ybar has wrong length");
  }
  long products = 0;
  Curvature next;
  return XgradStepImpl(A, z, CurvatureAt(A, z.x, z.y()), vx, vy, logybar,
                       alpha, beta, next, products);
}

long iteration_bound(int d, double L, double epsilon,
                     const SolverParams& params) {
  double range = 1.0 + (params.alpha + params.beta + params.gamma) *
                           std::log(static_cast<double>(d));
  return static_cast<long>(
      std::ceil(2.0 * range * L / (params.eta * epsilon)));
}

SolveResult solve(const BoxSimplexInstance& inst, const SolverParams& params) {
  if (!(params.epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (!(params.eta > 0.0 && params.eta <= 1.0 / 3.0 + 1e-15)) {
    throw std::invalid_argument("eta must lie in (0, 1/3]");
  }
  if (!(params.beta >= params.alpha && params.alpha >= 0.5 &&
        params.gamma >= params.alpha + params.beta)) {
    throw std::invalid_argument(
        "parameters must satisfy beta >= alpha >= 1/2 and gamma >= alpha + beta");
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  if (inst.L == 0.0) {
    SolveResult res = DirectSolve(inst);
    res.trace.back().seconds = elapsed();
    return res;
  }

  // Identically-zero rows decouple: x_i = -sign(c_i) is optimal for them and
  // contributes nothing to the gap.
  std::vector<bool> empty = inst.A.empty_rows();
  std::vector<int> kept;
  for (int i = 0; i < inst.n(); ++i) {
    if (!empty[i]) kept.push_back(i);
  }
  const double L = inst.L;
  const SparseMatrix A = inst.A.select_rows(kept).scaled(1.0 / L);
  const Vec b = inst.b / L;
  Vec c(kept.size());
  for (size_t k = 0; k < kept.size(); ++k) c[k] = inst.c[kept[k]] / L;
  const int n = A.rows();
  const int d = A.cols();

  Vec x_full = Vec::Zero(inst.n());
  for (int i = 0; i < inst.n(); ++i) {
    if (empty[i]) {
      x_full[i] = inst.c[i] > 0.0 ? -1.0 : (inst.c[i] < 0.0 ? 1.0 : 0.0);
    }
  }
  auto expand = [&](const Vec& x) {
    Vec out = x_full;
    for (size_t k = 0; k < kept.size(); ++k) out[kept[k]] = x[k];
    return out;
  };

  SolveResult res;
  res.L = L;
  res.T = params.max_iters ? *params.max_iters
                           : iteration_bound(d, L, params.epsilon, params);
  if (res.T < 1) res.T = 1;
  const long stride = params.trace_every > 0
                          ? params.trace_every
                          : std::max<long>(1, (res.T + 99) / 100);

  PrimalDualPoint z = PrimalDualPoint::Center(n, d);
  Vec logybar = Vec::Zero(d);
  Curvature cz = CurvatureAt(A, z.x, z.y());
  CompensatedSum sum_x(n);
  CompensatedSum sum_y(d);
  const double eta = params.eta;
  long products = 0;
  long t = 0;
  while (t < res.T) {
    const Vec y = z.y();
    Vec gx = eta * (A.times(y) + c);
    Vec gy = eta * (b - A.transpose_times(z.x));
    products += 2;
    PrimalDualPoint zp = GradStep(A, z, cz, gx, gy, params.beta, products);
    const Vec yp = zp.logy.array().exp();
    sum_x.add(zp.x);
    sum_y.add(yp);

    gx = (eta / 2.0) * (A.times(yp) + c);
    gy = (eta / 2.0) * (b - A.transpose_times(zp.x));
    products += 2;
    Curvature next;
    XgradStep step =
        XgradStepImpl(A, z, cz, gx, gy, logybar, params.alpha + params.beta,
                      params.gamma, next, products);
    z = std::move(step.z_plus);
    logybar = std::move(step.logybar_plus);
    cz = std::move(next);
    ++t;

    if (t % stride == 0 || t == res.T) {
      Vec xa = expand(sum_x.sum / static_cast<double>(t));
      Vec ya = sum_y.sum / static_cast<double>(t);
      double gap = duality_gap(inst, xa, ya);
      res.trace.push_back({t, gap, elapsed()});
      if (params.early_exit && gap <= params.epsilon && t < res.T) {
        res.early_exit = true;
        break;
      }
    }
  }
  res.iterations = t;
  res.x = expand(sum_x.sum / static_cast<double>(t));
  res.y = sum_y.sum / static_cast<double>(t);
  res.gap = res.trace.back().gap;
  res.value = game_value(inst, res.x, res.y);
  res.products_per_iteration = static_cast<double>(products) / t;
  return res;
}

}  // namespace acsolve
