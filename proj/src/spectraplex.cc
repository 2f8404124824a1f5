#include "acsolve/spectraplex.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "acsolve/meq.h"
#include "acsolve/subproblem.h"

namespace acsolve {

namespace {

using Eigen::SelfAdjointEigenSolver;

double Frobenius(const Mat& A, const Mat& B) { return A.cwiseProduct(B).sum(); }

void RequireSymmetric(const Mat& M, int d, const char* what) {
  if (M.rows() != d || M.cols() != d) {
    throw std::invalid_argument(std::string(what) + ": expected a " +
                                std::to_string(d) + " x " + std::to_string(d) +
                                " matrix");
  }
  if (!M.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric");
  }
}

Vec Square(const Vec& x) { return x.cwiseProduct(x); }

// |A|*(Y) + mu / 2 from the oracle, clipped at mu / 2 since the true value
// is nonnegative.
Vec CurvatureQ(MeqOracle& meq, const Coef& y, double Delta, double mu) {
  Vec q = meq.abs_adjoint(y, Delta, mu).cwiseMax(0.0);
  return q.array() + 0.5 * mu;
}

// Kahan-compensated running sum of matrices.
struct CompensatedMat {
  Mat sum;
  Mat comp;
  CompensatedMat(long r, long c) : sum(Mat::Zero(r, c)), comp(Mat::Zero(r, c)) {}
  void add(const Mat& m) {
    for (long k = 0; k < m.size(); ++k) {
      double y = m.data()[k] - comp.data()[k];
      double t = sum.data()[k] + y;
      comp.data()[k] = (t - sum.data()[k]) - y;
      sum.data()[k] = t;
    }
  }
};

uint64_t CallSeed(uint64_t base, long call) {
  return base + 0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(call + 1);
}

}  // namespace

OperatorSet OperatorSet::Make(std::vector<Mat> A, Mat B, Vec c) {
  const int d = static_cast<int>(B.rows());
  if (d < 1) throw std::invalid_argument("B must be at least 1 x 1");
  RequireSymmetric(B, d, "B");
  if (c.size() != static_cast<long>(A.size())) {
    throw std::invalid_argument("c must have one entry per A_i");
  }
  if (!c.allFinite()) throw std::invalid_argument("c: non-finite entry");
  OperatorSet ops;
  Mat sum_abs = Mat::Zero(d, d);
  for (size_t i = 0; i < A.size(); ++i) {
    const std::string name = "A_" + std::to_string(i + 1);
    RequireSymmetric(A[i], d, name.c_str());
    A[i] = 0.5 * (A[i] + A[i].transpose());
    ops.absA.push_back(spectral_abs(A[i]));
    sum_abs += ops.absA.back();
  }
  ops.A = std::move(A);
  ops.B = 0.5 * (B + B.transpose());
  ops.c = std::move(c);
  ops.L_A = ops.A.empty() ? 0.0 : std::max(0.0, lambda_max(sum_abs));
  SelfAdjointEigenSolver<Mat> es(ops.B, Eigen::EigenvaluesOnly);
  ops.B_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  return ops;
}

OperatorSet OperatorSet::FromBoxSimplex(const BoxSimplexInstance& inst) {
  const Mat A = inst.A.to_dense();
  std::vector<Mat> mats;
  mats.reserve(inst.n());
  for (int i = 0; i < inst.n(); ++i) {
    mats.push_back(A.row(i).transpose().asDiagonal());
  }
  return Make(std::move(mats), inst.b.asDiagonal(), inst.c);
}

Mat OperatorSet::op(const Vec& x) const {
  Mat out = Mat::Zero(d(), d());
  for (int i = 0; i < n(); ++i) {
    if (x[i] != 0.0) out += x[i] * A[i];
  }
  return out;
}

Mat OperatorSet::abs_op(const Vec& x) const {
  Mat out = Mat::Zero(d(), d());
  for (int i = 0; i < n(); ++i) {
    if (x[i] != 0.0) out += x[i] * absA[i];
  }
  return out;
}

Vec OperatorSet::adj(const Mat& Y) const {
  Vec out(n());
  for (int i = 0; i < n(); ++i) out[i] = Frobenius(A[i], Y);
  return out;
}

Vec OperatorSet::abs_adj(const Mat& Y) const {
  Vec out(n());
  for (int i = 0; i < n(); ++i) out[i] = Frobenius(absA[i], Y);
  return out;
}

OperatorSet OperatorSet::scaled(double s) const {
  OperatorSet out;
  for (const Mat& m : A) out.A.push_back(s * m);
  for (const Mat& m : absA) out.absA.push_back(std::abs(s) * m);
  out.B = s * B;
  out.c = s * c;
  out.L_A = std::abs(s) * L_A;
  out.B_norm = std::abs(s) * B_norm;
  return out;
}

double lipschitz_op(const OperatorSet& ops) { return ops.L_A; }

Mat Coef::matrix(const OperatorSet& ops) const {
  return ops.op(w) + ops.abs_op(wp) + b * ops.B;
}

double Coef::max_abs() const {
  double m = std::abs(b);
  if (w.size() > 0) m = std::max(m, w.cwiseAbs().maxCoeff());
  if (wp.size() > 0) m = std::max(m, wp.cwiseAbs().maxCoeff());
  return m;
}

double Coef::norm_bound(const OperatorSet& ops) const {
  double ww = w.size() > 0 ? w.cwiseAbs().maxCoeff() : 0.0;
  double wwp = wp.size() > 0 ? wp.cwiseAbs().maxCoeff() : 0.0;
  return (ww + wwp) * ops.L_A + std::abs(b) * ops.B_norm;
}

Mat materialize(const OperatorSet& ops, const Coef& coef) {
  return exp_normalized(coef.matrix(ops));
}

double neg_von_neumann(const Mat& Y) {
  SelfAdjointEigenSolver<Mat> es(Y, Eigen::EigenvaluesOnly);
  double out = 0.0;
  for (double l : es.eigenvalues()) {
    if (l < -1e-12) throw std::domain_error("negative eigenvalue in entropy");
    if (l > 0.0) out += l * std::log(l);
  }
  return out;
}

Mat log_psd(const Mat& Y) {
  SelfAdjointEigenSolver<Mat> es(Y);
  const Vec& l = es.eigenvalues();
  if (l.minCoeff() <= 0.0) {
    throw std::domain_error("matrix logarithm of a singular matrix");
  }
  const Mat& V = es.eigenvectors();
  return V * l.array().log().matrix().asDiagonal() * V.transpose();
}

double quantum_relative_entropy(const Mat& Y, const Mat& Yp) {
  return neg_von_neumann(Yp) - Frobenius(Yp, log_psd(Y)) - Yp.trace() +
         Y.trace();
}

RsdpEval rsdp_value_and_grads(const OperatorSet& ops, double alpha, double mu,
                              const Vec& x, const Mat& Y) {
  const Vec q = ops.abs_adj(Y);
  const Vec x2 = Square(x);
  RsdpEval out;
  out.value = q.dot(x2) + 0.5 * mu * x.squaredNorm();
  out.grad_x = 2.0 * q.cwiseProduct(x) + mu * x;
  out.grad_y = ops.abs_op(x2);
  if (alpha != 0.0) {
    out.value += alpha * neg_von_neumann(Y);
    out.grad_y += alpha * (log_psd(Y) + Mat::Identity(ops.d(), ops.d()));
  }
  return out;
}

double rsdp_value(const OperatorSet& ops, double alpha, double mu, const Vec& x,
                  const Mat& Y) {
  double v = ops.abs_adj(Y).dot(Square(x)) + 0.5 * mu * x.squaredNorm();
  if (alpha != 0.0) v += alpha * neg_von_neumann(Y);
  return v;
}

double rsdp_bregman(const OperatorSet& ops, double alpha, double mu,
                    const Vec& x, const Mat& Y, const Vec& xp, const Mat& Yp) {
  const Vec q = ops.abs_adj(Y);
  const Vec dq = ops.abs_adj(Yp - Y);
  const Vec dx = xp - x;
  double v = q.dot(Square(dx)) + dq.dot(Square(xp) - Square(x)) +
             0.5 * mu * dx.squaredNorm();
  if (alpha != 0.0) v += alpha * quantum_relative_entropy(Y, Yp);
  return v;
}

double spectraplex_gap(const OperatorSet& ops, const Vec& x, const Mat& Y) {
  return ops.c.dot(x) + lambda_max(ops.op(x) - ops.B) +
         (ops.adj(Y) + ops.c).lpNorm<1>() + Frobenius(ops.B, Y);
}

double spectraplex_value(const OperatorSet& ops, const Vec& x, const Mat& Y) {
  return Frobenius(Y, ops.op(x) - ops.B) + ops.c.dot(x);
}

MeqMode parse_meq_mode(const std::string& s) {
  if (s == "exact") return MeqMode::kExact;
  if (s == "sketched") return MeqMode::kSketched;
  throw std::invalid_argument("unknown MEQ mode '" + s +
                              "' (expected exact or sketched)");
}

std::string to_string(MeqMode mode) {
  return mode == MeqMode::kExact ? "exact" : "sketched";
}

MeqOracle::MeqOracle(const OperatorSet& ops, MeqMode mode, double delta,
                     uint64_t seed, std::optional<double> accuracy)
    : ops_(ops), mode_(mode), delta_(delta), seed_(seed), accuracy_(accuracy) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("MEQ failure probability must lie in (0, 1)");
  }
  if (accuracy && !(*accuracy > 0.0 && *accuracy < 1.0)) {
    throw std::invalid_argument("MEQ accuracy must lie in (0, 1)");
  }
}

const Mat& MeqOracle::exact_point(const Coef& y) {
  for (const auto& [coef, Y] : cache_) {
    if (coef == y) return Y;
  }
  if (cache_.size() >= 6) cache_.erase(cache_.begin());
  cache_.emplace_back(y, materialize(ops_, y));
  return cache_.back().second;
}

Vec MeqOracle::Query(const std::vector<Mat>& mats, const Coef& y, double eps,
                     double gamma) {
  ++calls_;
  if (mode_ == MeqMode::kExact) {
    const Mat& Y = exact_point(y);
    Vec out(mats.size());
    for (size_t i = 0; i < mats.size(); ++i) out[i] = Frobenius(mats[i], Y);
    return out;
  }
  if (accuracy_) {
    gamma *= *accuracy_ / eps;
    eps = *accuracy_;
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument(
        "sketched MEQ needs a query accuracy in (0, 1)");
  }
  const int d = ops_.d();
  const double k = std::ceil(24.0 / (eps * eps) * std::log(d / (0.5 * delta_)));
  if (k * d > kMaxSketchWork) {
    std::ostringstream msg;
    msg << "sketched MEQ at accuracy " << eps << " needs " << k
        << " sketch rows for d = " << d
        << "; use exact mode or a coarser MEQ accuracy";
    throw std::runtime_error(msg.str());
  }
  sketch_rows_ += static_cast<long>(k);
  MeqParams p;
  p.eps_mul = eps;
  p.delta = delta_;
  p.gamma_add = std::min(gamma, 0.5);
  p.R = std::max(1.0, y.norm_bound(ops_));
  p.seed = CallSeed(seed_, calls_);
  return meq_sketched(mats, y.matrix(ops_), p);
}

Vec MeqOracle::abs_adjoint(const Coef& y, double Delta, double mu) {
  const double d = ops_.d();
  return Query(ops_.absA, y, 0.5 * Delta, mu * Delta / (2.0 * d));
}

Vec MeqOracle::adjoint(const Coef& y, double Delta) {
  const double d = ops_.d();
  return Query(ops_.A, y, 0.5 * Delta, Delta / (2.0 * d));
}

Vec best_response_spec(const OperatorSet& ops, const Coef& y, const Vec& v,
                       double mu, double Delta, MeqOracle& meq) {
  if (v.size() != ops.n()) {
    throw std::invalid_argument("best_response_spec: v has wrong length");
  }
  return best_response_x(v, CurvatureQ(meq, y, Delta, mu));
}

SpectraplexPoint approx_grad_step(const OperatorSet& ops,
                                  const SpectraplexPoint& z,
                                  const SpectraplexDual& v,
                                  const StepParams& p, MeqOracle& meq) {
  if (!(p.beta >= p.alpha && p.alpha >= 0.5)) {
    throw std::invalid_argument("oracle requires beta >= alpha >= 1/2");
  }
  const int n = ops.n();
  const Vec q = CurvatureQ(meq, z.y, p.Delta, p.mu);
  const Vec u = v.vx - 2.0 * q.cwiseProduct(z.x);
  const Vec xhat = best_response_x(u, q);
  const Coef shift{Vec::Zero(n), Square(xhat) - Square(z.x), 0.0};
  Coef yp = z.y - (v.vy + shift) * (1.0 / p.beta);
  Vec xp = best_response_x(u, CurvatureQ(meq, yp, p.Delta, p.mu));
  return {std::move(xp), std::move(yp)};
}

SpectraplexXgrad approx_xgrad_step(const OperatorSet& ops,
                                   const SpectraplexPoint& z,
                                   const SpectraplexDual& v, const Coef& ybar,
                                   const StepParams& p, MeqOracle& meq) {
  if (!(p.beta >= p.alpha && p.alpha >= 0.5)) {
    throw std::invalid_argument("oracle requires beta >= alpha >= 1/2");
  }
  const int n = ops.n();
  const Vec x2 = Square(z.x);
  const Vec q = CurvatureQ(meq, z.y, p.Delta, p.mu);
  const Vec u = v.vx - 2.0 * q.cwiseProduct(z.x);
  const Vec xbar = best_response_x(u, CurvatureQ(meq, ybar, p.Delta, p.mu));
  const Coef drift = (ybar - z.y) * p.alpha;
  const Coef shift_bar{Vec::Zero(n), Square(xbar) - x2, 0.0};
  Coef yplus = ybar - (v.vy + shift_bar + drift) * (1.0 / p.beta);
  Vec xplus = best_response_x(u, CurvatureQ(meq, yplus, p.Delta, p.mu));
  const Coef shift_plus{Vec::Zero(n), Square(xplus) - x2, 0.0};
  Coef ybar_plus =
      ybar - (v.vy + shift_plus + (yplus - z.y) * p.alpha) * (1.0 / p.beta);
  return {{std::move(xplus), std::move(yplus)}, std::move(ybar_plus)};
}

long spectraplex_iteration_bound(int n, int d, double eps_scaled,
                                 const SpectraplexParams& params) {
  const double mu = params.mu.value_or(n > 0 ? 1.0 / n : 0.0);
  const double range = 1.0 +
                       (params.alpha + params.beta + params.gamma) *
                           std::log(static_cast<double>(d)) +
                       0.5 * mu * n;
  return static_cast<long>(std::ceil(2.0 * range / (params.eta * eps_scaled)));
}

SpectraplexResult solve_spectraplex(const OperatorSet& ops,
                                    const SpectraplexParams& params) {
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
  if (!(params.delta > 0.0 && params.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };
  const int n = ops.n();
  const int d = ops.d();

  SpectraplexResult res;
  res.L_A = ops.L_A;
  res.L_tot = ops.L_tot();

  if (ops.L_A == 0.0) {
    // x drops out of the bilinear term, so both players decouple.
    res.x = Vec(n);
    for (int i = 0; i < n; ++i) {
      res.x[i] = ops.c[i] > 0.0 ? -1.0 : (ops.c[i] < 0.0 ? 1.0 : 0.0);
    }
    SelfAdjointEigenSolver<Mat> es(ops.B);
    const Vec v = es.eigenvectors().col(0);
    res.Y = v * v.transpose();
    res.gap = spectraplex_gap(ops, res.x, res.Y);
    res.value = spectraplex_value(ops, res.x, res.Y);
    res.trace.push_back({0, res.gap, elapsed()});
    return res;
  }

  const OperatorSet s = ops.scaled(1.0 / ops.L_A);
  const double eps_scaled = params.epsilon / ops.L_A;
  const bool sketched = params.meq == MeqMode::kSketched;
  const double eps_target = sketched ? 0.5 * eps_scaled : eps_scaled;
  const double mu = params.mu.value_or(1.0 / n);
  const double eta = params.eta;
  res.T = params.max_iters
              ? *params.max_iters
              : spectraplex_iteration_bound(n, d, eps_target, params);
  if (res.T < 1) res.T = 1;
  const double Delta = sketched ? eta * eps_scaled / 10.0 / 11.0 : 0.0;
  res.query_accuracy = Delta;
  const long stride = params.trace_every > 0
                          ? params.trace_every
                          : std::max<long>(1, (res.T + 99) / 100);

  // Seven queries per iteration share the failure budget.
  MeqOracle meq(s, params.meq,
                std::min(0.5, params.delta / (8.0 * static_cast<double>(res.T))),
                params.seed, params.meq_accuracy);
  const StepParams grad{params.alpha, params.beta, mu, Delta};
  const StepParams xgrad{params.alpha + params.beta, params.gamma, mu, Delta};

  SpectraplexPoint z{Vec::Zero(n), Coef::Zero(n)};
  Coef ybar = Coef::Zero(n);
  Vec sum_x = Vec::Zero(n);
  Vec comp_x = Vec::Zero(n);
  CompensatedMat sum_Y(d, d);
  long t = 0;
  while (t < res.T) {
    const Vec gx = meq.adjoint(z.y, Delta) + s.c;
    const SpectraplexDual v{eta * gx,
                            Coef{-eta * z.x, Vec::Zero(n), eta}};
    SpectraplexPoint zp = approx_grad_step(s, z, v, grad, meq);
    for (int i = 0; i < n; ++i) {
      double y = zp.x[i] - comp_x[i];
      double tt = sum_x[i] + y;
      comp_x[i] = (tt - sum_x[i]) - y;
      sum_x[i] = tt;
    }
    sum_Y.add(meq.exact_point(zp.y));

    const Vec gxp = meq.adjoint(zp.y, Delta) + s.c;
    const SpectraplexDual v2{0.5 * eta * gxp,
                             Coef{-0.5 * eta * zp.x, Vec::Zero(n), 0.5 * eta}};
    SpectraplexXgrad step = approx_xgrad_step(s, z, v2, ybar, xgrad, meq);
    res.max_coef = std::max({res.max_coef, zp.y.max_abs(),
                             step.z_plus.y.max_abs(), step.ybar_plus.max_abs()});
    z = std::move(step.z_plus);
    ybar = std::move(step.ybar_plus);
    ++t;

    if (t % stride == 0 || t == res.T) {
      const Vec xa = sum_x / static_cast<double>(t);
      const Mat Ya = sum_Y.sum / static_cast<double>(t);
      const double gap = spectraplex_gap(ops, xa, Ya);
      res.trace.push_back({t, gap, elapsed()});
      if (params.early_exit && gap <= params.epsilon && t < res.T) {
        res.early_exit = true;
        break;
      }
    }
  }
  res.iterations = t;
  res.x = sum_x / static_cast<double>(t);
  res.Y = sum_Y.sum / static_cast<double>(t);
  res.gap = res.trace.back().gap;
  res.value = spectraplex_value(ops, res.x, res.Y);
  res.meq_calls = meq.calls();
  return res;
}

double vn_hessian_fd(const Mat& Y, const Mat& M, double t) {
  // Central second difference: odd-order terms cancel.
  return (quantum_relative_entropy(Y, Y + t * M) +
          quantum_relative_entropy(Y, Y - t * M)) /
         (t * t);
}

DominationCheck check_entropy_domination(const std::vector<Mat>& partition,
                                         const Mat& Y, const Mat& M) {
  Vec y(partition.size());
  Vec m(partition.size());
  for (size_t i = 0; i < partition.size(); ++i) {
    y[i] = Frobenius(partition[i], Y);
    m[i] = Frobenius(partition[i], M);
  }
  auto kl = [&](const Vec& yp) {
    double out = 0.0;
    for (long i = 0; i < y.size(); ++i) {
      if (yp[i] > 0.0) out += yp[i] * std::log(yp[i] / y[i]);
      out += y[i] - yp[i];
    }
    return out;
  };
  DominationCheck out;
  out.excess = -1e300;
  bool all_violated = true;
  for (double t : {1e-3, 1e-4}) {
    out.lhs = vn_hessian_fd(Y, M, t);
    out.rhs = (kl(y + t * m) + kl(y - t * m)) / (t * t);
    const double excess = out.rhs - out.lhs - 1e-4 * std::max(1.0, std::abs(out.lhs));
    out.excess = std::max(out.excess, excess);
    all_violated = all_violated && excess > 0.0;
  }
  // A genuine violation persists as the step shrinks.
  out.violated = all_violated;
  return out;
}

std::vector<Mat> random_psd_partition(Rng& rng, int d, int count, int rank) {
  if (d < 1 || count < 1 || rank < 1) {
    throw std::invalid_argument("random_psd_partition: sizes must be positive");
  }
  std::vector<Mat> P;
  Mat S = Mat::Zero(d, d);
  for (int i = 0; i < count; ++i) {
    Mat G(d, rank);
    for (int c = 0; c < rank; ++c) G.col(c) = gaussian(rng, d);
    P.push_back(G * G.transpose());
    S += P.back();
  }
  SelfAdjointEigenSolver<Mat> es(S);
  if (es.eigenvalues().minCoeff() <= 1e-10 * es.eigenvalues().maxCoeff()) {
    throw std::invalid_argument(
        "random_psd_partition: count * rank too small to span the space");
  }
  const Mat W = es.eigenvectors() *
                es.eigenvalues().array().rsqrt().matrix().asDiagonal() *
                es.eigenvectors().transpose();
  for (Mat& p : P) {
    p = W * p * W;
    p = 0.5 * (p + p.transpose());
  }
  return P;
}

}  // namespace acsolve
