#include "acsolve/core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace acsolve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void RequireFinite(const Vec& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + " has non-finite entries");
  }
}

void RequireSize(long got, long want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string("dimension mismatch: ") + what +
                                " has length " + std::to_string(got) +
                                ", expected " + std::to_string(want));
  }
}

}  // namespace

BoxSimplexInstance BoxSimplexInstance::Make(SparseMatrix A, Vec b, Vec c) {
  if (A.cols() == 0) {
    throw std::invalid_argument("simplex dimension d must be positive");
  }
  RequireSize(b.size(), A.cols(), "b");
  RequireSize(c.size(), A.rows(), "c");
  RequireFinite(b, "b");
  RequireFinite(c, "c");
  BoxSimplexInstance inst{std::move(A), std::move(b), std::move(c), 0.0};
  inst.L = lipschitz_1to1(inst.A);
  return inst;
}

PrimalDualPoint PrimalDualPoint::Center(int n, int d) {
  return {Vec::Zero(n), Vec::Zero(d)};
}

PrimalDualPoint PrimalDualPoint::FromSimplex(const Vec& x, const Vec& y) {
  Vec logy(y.size());
  for (int j = 0; j < y.size(); ++j) {
    logy[j] = y[j] > 0.0 ? std::log(y[j]) : -kInf;
  }
  return {x, logy};
}

Vec PrimalDualPoint::y() const { return SoftmaxFromLog(logy); }

Vec PrimalDualPoint::normalized_logy() const {
  return logy.array() - LogSumExp(logy);
}

double LogSumExp(const Vec& v) {
  if (v.size() == 0) return -kInf;
  double m = v.maxCoeff();
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double e : v) s += std::exp(e - m);
  return m + std::log(s);
}

Vec SoftmaxFromLog(const Vec& logw) {
  double m = logw.maxCoeff();
  Vec w = (logw.array() - m).exp();
  return w / w.sum();
}

double lipschitz_1to1(const SparseMatrix& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  Vec colsums = A.abs_transpose_times(Vec::Ones(A.rows()));
  return colsums.maxCoeff();
}

Gradient gradient(const BoxSimplexInstance& inst, const Vec& x, const Vec& y) {
  RequireSize(x.size(), inst.n(), "x");
  RequireSize(y.size(), inst.d(), "y");
  return {inst.A.times(y) + inst.c, inst.b - inst.A.transpose_times(x)};
}

Gradient gradient(const BoxSimplexInstance& inst, const PrimalDualPoint& z) {
  return gradient(inst, z.x, z.y());
}

double neg_entropy(const Vec& y) {
  double s = 0.0;
  for (double v : y) {
    if (v > 0.0) s += v * std::log(v);
  }
  return s;
}

double regularizer(const SparseMatrix& A, double alpha, const Vec& x,
                   const Vec& y) {
  double quad = A.abs_times(y).dot(x.cwiseProduct(x));
  return alpha == 0.0 ? quad : quad + alpha * neg_entropy(y);
}

double regularizer(const SparseMatrix& A, double alpha,
                   const PrimalDualPoint& z) {
  return regularizer(A, alpha, z.x, z.y());
}

Gradient regularizer_gradient(const SparseMatrix& A, double alpha,
                              const Vec& x, const Vec& y) {
  Vec gx = 2.0 * x.cwiseProduct(A.abs_times(y));
  Vec gy = A.abs_transpose_times(x.cwiseProduct(x));
  if (alpha != 0.0) gy.array() += alpha * (y.array().log() + 1.0);
  return {gx, gy};
}

double bregman(const SparseMatrix& A, double alpha, const PrimalDualPoint& z,
               const PrimalDualPoint& zp) {
  const Vec y = z.y();
  const Vec yp = zp.y();
  const Vec dx = zp.x - z.x;
  const Vec dsq = zp.x.cwiseProduct(zp.x) - z.x.cwiseProduct(z.x);
  double quad = A.abs_times(y).dot(dx.cwiseProduct(dx)) +
                A.abs_times(yp - y).dot(dsq);
  if (alpha == 0.0) return quad;
  return quad +
         entropy_bregman_log(alpha, z.normalized_logy(), zp.normalized_logy());
}

double entropy_bregman_log(double beta, const Vec& logy, const Vec& logyp) {
  RequireSize(logyp.size(), logy.size(), "y'");
  const Vec ly = logy.array() - LogSumExp(logy);
  const Vec lyp = logyp.array() - LogSumExp(logyp);
  double kl = 0.0;
  for (int j = 0; j < ly.size(); ++j) {
    if (lyp[j] == -kInf) continue;
    if (ly[j] == -kInf) return kInf;
    kl += std::exp(lyp[j]) * (lyp[j] - ly[j]);
  }
  return beta * std::max(kl, 0.0);
}

double entropy_bregman(double beta, const Vec& y, const Vec& yp) {
  return entropy_bregman_log(beta, PrimalDualPoint::FromSimplex(Vec(), y).logy,
                             PrimalDualPoint::FromSimplex(Vec(), yp).logy);
}

double game_value(const BoxSimplexInstance& inst, const Vec& x, const Vec& y) {
  RequireSize(x.size(), inst.n(), "x");
  RequireSize(y.size(), inst.d(), "y");
  return x.dot(inst.A.times(y)) - inst.b.dot(y) + inst.c.dot(x);
}

double duality_gap(const BoxSimplexInstance& inst, const Vec& x, const Vec& y) {
  RequireSize(x.size(), inst.n(), "x");
  RequireSize(y.size(), inst.d(), "y");
  double best_y = inst.c.dot(x) + (inst.A.transpose_times(x) - inst.b).maxCoeff();
  double best_x = -(inst.A.times(y) + inst.c).lpNorm<1>() - inst.b.dot(y);
  return best_y - best_x;
}

double duality_gap(const BoxSimplexInstance& inst, const PrimalDualPoint& z) {
  return duality_gap(inst, z.x, z.y());
}

BoxSimplexInstance dualize(const SimplexMinGame& game) {
  return BoxSimplexInstance::Make(game.M.scaled(-1.0), game.p, -game.q);
}

SimplexMinGame dualize(const BoxSimplexInstance& inst) {
  return {inst.A.scaled(-1.0), inst.b, -inst.c};
}

double game_value(const SimplexMinGame& game, const Vec& x, const Vec& y) {
  return x.dot(game.M.times(y)) + game.p.dot(y) + game.q.dot(x);
}

}  // namespace acsolve
