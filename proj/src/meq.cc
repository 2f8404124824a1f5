#include "acsolve/meq.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace acsolve {

namespace {

using Eigen::SelfAdjointEigenSolver;

void RequireSquare(const Mat& M, const char* what) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }
}

void RequireUnit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  }
}

Mat Reconstruct(const SelfAdjointEigenSolver<Mat>& es, const Vec& w) {
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

// Orthogonalizes the columns of X against V and each other (two passes of
// Gram-Schmidt), dropping columns that collapse. Returns the new block.
Mat OrthonormalBlock(const Mat& V, const Mat& X) {
  Mat out(X.rows(), 0);
  for (int j = 0; j < X.cols(); ++j) {
    Vec v = X.col(j);
    const double before = v.norm();
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (V.cols() > 0) v -= V * (V.transpose() * v);
      if (out.cols() > 0) v -= out * (out.transpose() * v);
    }
    const double after = v.norm();
    if (after <= 1e-10 * before) continue;
    out.conservativeResize(Eigen::NoChange, out.cols() + 1);
    out.col(out.cols() - 1) = v / after;
  }
  return out;
}

double Frobenius(const Mat& A, const Mat& B) { return A.cwiseProduct(B).sum(); }

}  // namespace

Mat spectral_abs(const Mat& A) {
  RequireSquare(A, "spectral_abs");
  SelfAdjointEigenSolver<Mat> es(A);
  return Reconstruct(es, es.eigenvalues().cwiseAbs());
}

Mat exp_symmetric(const Mat& A) {
  RequireSquare(A, "exp_symmetric");
  SelfAdjointEigenSolver<Mat> es(A);
  return Reconstruct(es, es.eigenvalues().array().exp().matrix());
}

Mat exp_normalized(const Mat& M) {
  RequireSquare(M, "exp_normalized");
  SelfAdjointEigenSolver<Mat> es(M);
  const Vec& lam = es.eigenvalues();
  Vec w = (lam.array() - lam.maxCoeff()).exp();
  return Reconstruct(es, w / w.sum());
}

double log_trace_exp(const Mat& M) {
  RequireSquare(M, "log_trace_exp");
  SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
  return LogSumExp(es.eigenvalues());
}

double lambda_max(const Mat& M) {
  RequireSquare(M, "lambda_max");
  if (M.rows() == 0) return -std::numeric_limits<double>::infinity();
  SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Vec meq_exact(const std::vector<Mat>& mats, const Mat& M) {
  Mat Y = exp_normalized(M);
  Vec out(mats.size());
  for (size_t i = 0; i < mats.size(); ++i) {
    if (mats[i].rows() != M.rows() || mats[i].cols() != M.cols()) {
      throw std::invalid_argument("meq_exact: dimension mismatch");
    }
    out[i] = Frobenius(mats[i], Y);
  }
  return out;
}

EigenEstimate top_eigenvalue(const Mat& M_psd, double eps, double delta,
                             uint64_t seed) {
  RequireSquare(M_psd, "top_eigenvalue");
  RequireUnit(eps, "eps");
  RequireUnit(delta, "delta");
  const int d = M_psd.rows();
  if (d == 0) throw std::invalid_argument("top_eigenvalue: empty matrix");
  const int block = std::min(d, 2);
  const int budget =
      1 + static_cast<int>(std::ceil(std::sqrt(1.0 / eps) *
                                     std::log(d / (delta * eps))));
  Rng rng(seed);
  Mat X(d, block);
  for (int j = 0; j < block; ++j) X.col(j) = gaussian(rng, d);
  Mat V(d, 0);
  Mat blk = OrthonormalBlock(V, X);
  EigenEstimate est;
  double prev = 0.0;
  for (int it = 1; it <= budget; ++it) {
    V.conservativeResize(Eigen::NoChange, V.cols() + blk.cols());
    V.rightCols(blk.cols()) = blk;
    Mat H = V.transpose() * M_psd * V;
    SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
    est.value = es.eigenvalues().maxCoeff();
    est.iterations = it;
    est.converged = std::abs(est.value - prev) <= 0.25 * eps * std::abs(est.value);
    prev = est.value;
    blk = OrthonormalBlock(V, M_psd * blk);
    if (blk.cols() == 0) {
      // The Krylov space is invariant, so the Ritz value is exact.
      est.converged = true;
      break;
    }
  }
  return est;
}

EigenEstimate top_eigenvalue_power(const Mat& M_psd, double eps, double delta,
                                   uint64_t seed) {
  RequireSquare(M_psd, "top_eigenvalue_power");
  RequireUnit(eps, "eps");
  RequireUnit(delta, "delta");
  const int d = M_psd.rows();
  if (d == 0) throw std::invalid_argument("top_eigenvalue_power: empty matrix");
  const int budget =
      1 + static_cast<int>(std::ceil(std::log(d / (delta * eps)) / eps));
  Rng rng(seed);
  Vec v = gaussian(rng, d).normalized();
  EigenEstimate est;
  for (int it = 1; it <= budget; ++it) {
    Vec w = M_psd * v;
    double rq = v.dot(w);
    est.converged = std::abs(rq - est.value) <= 0.01 * eps * std::abs(rq);
    est.value = std::max(est.value, rq);
    est.iterations = it;
    double nw = w.norm();
    if (nw == 0.0) {
      est.converged = true;
      break;
    }
    v = w / nw;
  }
  return est;
}

int ExpPolynomial::degree_for(double R, double eps, double c_degree) {
  const double l = std::log(1.0 / eps);
  return std::max(1, static_cast<int>(std::ceil(c_degree * (std::sqrt(R * l) + l))));
}

ExpPolynomial::ExpPolynomial(double R, double eps, double c_degree)
    : ExpPolynomial(R, (RequireUnit(eps, "eps"), degree_for(R, eps, c_degree))) {}

ExpPolynomial ExpPolynomial::with_degree(double R, int degree) {
  return ExpPolynomial(R, degree);
}

ExpPolynomial::ExpPolynomial(double R, int deg) : R_(R) {
  if (!(R > 0.0)) throw std::invalid_argument("ExpPolynomial: R must be positive");
  if (deg < 0) throw std::invalid_argument("ExpPolynomial: negative degree");
  const int N = 2 * deg + 16;
  std::vector<double> f(N);
  for (int k = 0; k < N; ++k) {
    double theta = std::numbers::pi * (k + 0.5) / N;
    f[k] = std::exp(-0.5 * R * (std::cos(theta) + 1.0));
  }
  coef_.assign(deg + 1, 0.0);
  for (int j = 0; j <= deg; ++j) {
    double s = 0.0;
    for (int k = 0; k < N; ++k) {
      s += f[k] * std::cos(j * std::numbers::pi * (k + 0.5) / N);
    }
    coef_[j] = 2.0 * s / N;
  }
  coef_[0] *= 0.5;
}

double ExpPolynomial::operator()(double t) const {
  const double s = 2.0 * t / R_ - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (int j = degree(); j >= 1; --j) {
    double b0 = 2.0 * s * b1 - b2 + coef_[j];
    b2 = b1;
    b1 = b0;
  }
  return s * b1 - b2 + coef_[0];
}

Mat ExpPolynomial::apply(const Mat& Mt, const Mat& V) const {
  RequireSquare(Mt, "ExpPolynomial::apply");
  if (V.rows() != Mt.rows()) {
    throw std::invalid_argument("ExpPolynomial::apply: dimension mismatch");
  }
  if (V.cols() > Mt.rows()) return matrix(Mt) * V;
  auto S = [&](const Mat& X) -> Mat { return (2.0 / R_) * (Mt * X) - X; };
  Mat b1 = Mat::Zero(V.rows(), V.cols()), b2 = b1;
  for (int j = degree(); j >= 1; --j) {
    Mat b0 = 2.0 * S(b1) - b2 + coef_[j] * V;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return S(b1) - b2 + coef_[0] * V;
}

Mat ExpPolynomial::matrix(const Mat& Mt) const {
  return apply(Mt, Mat::Identity(Mt.rows(), Mt.rows()));
}

Vec poly_exp_apply(const Mat& Mtilde, double R, double eps_tilde, const Vec& v) {
  return ExpPolynomial(R, eps_tilde).apply(Mtilde, v);
}

int sketch_rows(int d, double eps, double delta, double c_jl) {
  RequireUnit(eps, "eps");
  RequireUnit(delta, "delta");
  const double k = std::ceil(c_jl / (eps * eps) * std::log(d / delta));
  if (k > std::numeric_limits<int>::max()) {
    throw std::runtime_error("sketch_rows: " + std::to_string(k) +
                             " rows exceed the supported range");
  }
  return std::max(1, static_cast<int>(k));
}

Mat jl_sketch(int k, int d, Rng& rng) {
  Mat Q(k, d);
  const double scale = std::sqrt(static_cast<double>(d) / k);
  for (int l = 0; l < k; ++l) {
    Vec g = gaussian(rng, d);
    Q.row(l) = scale * g.transpose() / g.norm();
  }
  return Q;
}

ShiftPlan shift_plan(const Mat& M, double R, double delta, uint64_t seed) {
  RequireSquare(M, "shift_plan");
  if (!(R > 0.0)) throw std::invalid_argument("shift_plan: R must be positive");
  const int d = M.rows();
  Mat shifted = M + 2.0 * R * Mat::Identity(d, d);
  EigenEstimate est = top_eigenvalue(shifted, std::min(0.5, 1.0 / (3.0 * R)),
                                     delta, seed);
  ShiftPlan plan;
  plan.shift = est.value + 1.0 - 2.0 * R;
  plan.Mtilde = plan.shift * Mat::Identity(d, d) - M;
  plan.bound = std::max(plan.shift + R, 1e-12);
  plan.converged = est.converged;
  return plan;
}

namespace {

constexpr uint64_t kSketchStream = 0x9e3779b97f4a7c15ULL;

// Q^T Q for Q = jl_sketch(k, d, rng), accumulated in row chunks so Q is never
// stored. Draws the same rows in the same order as jl_sketch.
Mat SketchGram(int k, int d, Rng& rng) {
  constexpr int kChunk = 512;
  Mat G = Mat::Zero(d, d);
  for (int start = 0; start < k; start += kChunk) {
    int rows = std::min(kChunk, k - start);
    Mat Qc = jl_sketch(rows, d, rng) * std::sqrt(static_cast<double>(rows) / k);
    G.selfadjointView<Eigen::Lower>().rankUpdate(Qc.transpose());
  }
  return G.selfadjointView<Eigen::Lower>();
}

// S = E Q^T Q E with E approximating exp(-Mtilde / 2), so that
// Tr S ~ Tr exp(-Mtilde) and <A, S> ~ <A, exp(-Mtilde)>.
Mat SketchedSquare(const ShiftPlan& plan, int k, bool identity, double poly_eps,
                   bool exact, Rng& rng) {
  const int d = plan.Mtilde.rows();
  const Mat half = 0.5 * plan.Mtilde;
  const ExpPolynomial poly(0.5 * plan.bound, poly_eps);
  auto E = [&] { return exact ? exp_symmetric(-half) : poly.matrix(half); };
  if (identity) {
    Mat e = E();
    return e * e;
  }
  if (k >= d) {
    Mat e = E();
    return e * SketchGram(k, d, rng) * e;
  }
  Mat Qt = jl_sketch(k, d, rng).transpose();
  Mat P = exact ? Mat(exp_symmetric(-half) * Qt) : poly.apply(half, Qt);
  return P * P.transpose();
}

}  // namespace

TraceEstimate approx_trace_exp(const Mat& M, double eps, double delta, double R,
                               uint64_t seed) {
  RequireUnit(eps, "eps");
  RequireUnit(delta, "delta");
  const int d = M.rows();
  ShiftPlan plan = shift_plan(M, R, 0.5 * delta, seed);
  Rng rng(seed ^ kSketchStream);
  Mat S = SketchedSquare(plan, sketch_rows(d, eps, 0.5 * delta), false,
                         eps / (8.0 * std::numbers::e * d), false, rng);
  TraceEstimate est;
  double s = S.trace();
  est.shift = plan.shift;
  est.value = std::exp(plan.shift) * s;
  est.log_value = plan.shift + std::log(s);
  est.converged = plan.converged;
  return est;
}

Vec meq_sketched(const std::vector<Mat>& mats, const Mat& M,
                 const MeqParams& params) {
  RequireSquare(M, "meq_sketched");
  RequireUnit(params.eps_mul, "eps");
  RequireUnit(params.delta, "delta");
  RequireUnit(params.gamma_add, "gamma");
  const int d = M.rows();
  for (const Mat& A : mats) {
    if (A.rows() != d || A.cols() != d) {
      throw std::invalid_argument("meq_sketched: dimension mismatch");
    }
  }
  ShiftPlan plan = shift_plan(M, params.R, 0.5 * params.delta, params.seed);
  Rng rng(params.seed ^ kSketchStream);
  const int k = params.identity_sketch
                    ? d
                    : sketch_rows(d, params.eps_mul, 0.5 * params.delta, params.c_jl);
  const double poly_eps =
      std::min(params.eps_mul / 8.0, params.gamma_add / 3.0) / (std::numbers::e * d);
  Mat S = SketchedSquare(plan, k, params.identity_sketch, poly_eps,
                         params.exact_exponential, rng);
  const double tr = S.trace();
  Vec out(mats.size());
  for (size_t i = 0; i < mats.size(); ++i) out[i] = Frobenius(mats[i], S) / tr;
  return out;
}

}  // namespace acsolve
