#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acsolve/boxsimplex.h"
#include "acsolve/core.h"
#include "acsolve/sampling.h"

namespace acsolve {

// Box-spectraplex game
//   min over x in [-1, 1]^n, max over Y in the spectraplex of
//   <Y, sum_i x_i A_i> - <B, Y> + c^T x.
struct OperatorSet {
  std::vector<Mat> A;
  std::vector<Mat> absA;  // spectral absolute values
  Mat B;
  Vec c;
  double L_A = 0.0;     // lambda_max(sum_i |A_i|)
  double B_norm = 0.0;  // ||B||_op

  // Validates symmetry to 1e-12 and shapes, computes |A_i|, L_A and ||B||.
  static OperatorSet Make(std::vector<Mat> A, Mat B, Vec c);
  // Diagonal embedding of a box-simplex instance: A_i = diag(row i of A).
  static OperatorSet FromBoxSimplex(const BoxSimplexInstance& inst);

  int n() const { return static_cast<int>(A.size()); }
  int d() const { return static_cast<int>(B.rows()); }
  double L_tot() const { return L_A + B_norm; }

  Mat op(const Vec& x) const;      // sum_i x_i A_i
  Mat abs_op(const Vec& x) const;  // sum_i x_i |A_i|
  Vec adj(const Mat& Y) const;     // (<A_i, Y>)_i
  Vec abs_adj(const Mat& Y) const; // (<|A_i|, Y>)_i
  OperatorSet scaled(double s) const;
};

double lipschitz_op(const OperatorSet& ops);

// Coefficients (w, w', b) of M = A(w) + |A|(w') + b B; the represented point
// is exp(M) / Tr exp(M).
struct Coef {
  Vec w;
  Vec wp;
  double b = 0.0;

  static Coef Zero(int n) { return {Vec::Zero(n), Vec::Zero(n), 0.0}; }
  Mat matrix(const OperatorSet& ops) const;
  double max_abs() const;
  // Upper bound on ||matrix(ops)||_op.
  double norm_bound(const OperatorSet& ops) const;
  Coef operator+(const Coef& o) const { return {w + o.w, wp + o.wp, b + o.b}; }
  Coef operator-(const Coef& o) const { return {w - o.w, wp - o.wp, b - o.b}; }
  Coef operator*(double s) const { return {s * w, s * wp, s * b}; }
  bool operator==(const Coef& o) const { return w == o.w && wp == o.wp && b == o.b; }
};

Mat materialize(const OperatorSet& ops, const Coef& coef);

struct SpectraplexPoint {
  Vec x;
  Coef y;
};

// Negated von Neumann entropy Tr(Y log Y) and the matrix log of a positive
// definite Y; both throw std::domain_error on a singular argument.
double neg_von_neumann(const Mat& Y);
Mat log_psd(const Mat& Y);
// Tr(Y' (log Y' - log Y)) - Tr(Y') + Tr(Y).
double quantum_relative_entropy(const Mat& Y, const Mat& Yp);

struct RsdpEval {
  double value = 0.0;
  Vec grad_x;
  Mat grad_y;
};

// r(x, Y) = <|A|*(Y), x^2> + alpha H(Y) + (mu / 2) ||x||^2 and its gradients
//   grad_x = 2 |A|*(Y) o x + mu x,  grad_Y = |A|(x^2) + alpha (log Y + I).
RsdpEval rsdp_value_and_grads(const OperatorSet& ops, double alpha, double mu,
                              const Vec& x, const Mat& Y);
double rsdp_value(const OperatorSet& ops, double alpha, double mu, const Vec& x,
                  const Mat& Y);
// V_z(z') in cancellation-free form.
double rsdp_bregman(const OperatorSet& ops, double alpha, double mu,
                    const Vec& x, const Mat& Y, const Vec& xp, const Mat& Yp);

// Closed-form duality gap
//   c^T x + lambda_max(A(x) - B) + ||A*(Y) + c||_1 + <B, Y>.
double spectraplex_gap(const OperatorSet& ops, const Vec& x, const Mat& Y);
double spectraplex_value(const OperatorSet& ops, const Vec& x, const Mat& Y);

enum class MeqMode { kExact, kSketched };

MeqMode parse_meq_mode(const std::string& s);
std::string to_string(MeqMode mode);

// Matrix exponential queries at points given by coefficients. Exact mode
// caches a few materialized points; sketched mode draws a fresh seed for
// every call.
class MeqOracle {
 public:
  MeqOracle(const OperatorSet& ops, MeqMode mode, double delta, uint64_t seed,
            std::optional<double> accuracy = std::nullopt);

  // Estimate of |A|*(Y) accurate to a (Delta / 2, delta, mu Delta / (2d)) query.
  Vec abs_adjoint(const Coef& y, double Delta, double mu);
  // Estimate of A*(Y) accurate to a (Delta / 2, delta, Delta / (2d)) query.
  Vec adjoint(const Coef& y, double Delta);
  const Mat& exact_point(const Coef& y);

  MeqMode mode() const { return mode_; }
  long calls() const { return calls_; }
  long sketch_rows_used() const { return sketch_rows_; }

 private:
  Vec Query(const std::vector<Mat>& mats, const Coef& y, double eps, double gamma);

  const OperatorSet& ops_;
  MeqMode mode_;
  double delta_;
  uint64_t seed_;
  std::optional<double> accuracy_;
  long calls_ = 0;
  long sketch_rows_ = 0;
  std::vector<std::pair<Coef, Mat>> cache_;
};

// Largest k * d a sketched query may use before the solver refuses.
inline constexpr double kMaxSketchWork = 5e8;

// argmin over the box of <v, x> + <q~, x^2> with q~ = |A|*(Y) + mu / 2 from
// the oracle.
Vec best_response_spec(const OperatorSet& ops, const Coef& y, const Vec& v,
                       double mu, double Delta, MeqOracle& meq);

struct StepParams {
  double alpha = 2.0;
  double beta = 2.0;
  double mu = 0.0;
  double Delta = 0.0;  // per-query accuracy in sketched mode
};

// v = (vx, vy) with vy = A(w_g) + |A|(w'_g) + b_g B.
struct SpectraplexDual {
  Vec vx;
  Coef vy;
};

// Gradient step: w = grad_x r(x, Y), xhat = best response at Y to vx - w,
// Y' = exact KL prox from Y, x' = best response at Y' to vx - w.
SpectraplexPoint approx_grad_step(const OperatorSet& ops,
                                  const SpectraplexPoint& z,
                                  const SpectraplexDual& v,
                                  const StepParams& params, MeqOracle& meq);

struct SpectraplexXgrad {
  SpectraplexPoint z_plus;
  Coef ybar_plus;
};

// Extragradient step with the auxiliary point ybar as prox center for both
// dual updates.
SpectraplexXgrad approx_xgrad_step(const OperatorSet& ops,
                                   const SpectraplexPoint& z,
                                   const SpectraplexDual& v, const Coef& ybar,
                                   const StepParams& params, MeqOracle& meq);

struct SpectraplexParams {
  double alpha = 2.0;
  double beta = 2.0;
  double gamma = 4.0;
  double eta = 1.0 / 3.0;
  std::optional<double> mu;  // defaults to 1 / n
  double epsilon = 0.1;
  double delta = 0.1;
  MeqMode meq = MeqMode::kExact;
  // Overrides the multiplicative query accuracy in sketched mode.
  std::optional<double> meq_accuracy;
  uint64_t seed = 20240601;
  std::optional<long> max_iters;
  long trace_every = 0;
  bool early_exit = true;
};

struct SpectraplexResult {
  Vec x;
  Mat Y;
  GapTrace trace;
  double gap = 0.0;
  double value = 0.0;
  double L_A = 0.0;
  double L_tot = 0.0;
  long T = 0;
  long iterations = 0;
  bool early_exit = false;
  double max_coef = 0.0;  // largest |coefficient| seen, after rescaling
  long meq_calls = 0;
  double query_accuracy = 0.0;  // Delta per query; 0 in exact mode
};

// ceil(2 (1 + (alpha + beta + gamma) ln d + mu n / 2) / (eta eps)) for an
// instance rescaled to L_A = 1.
long spectraplex_iteration_bound(int n, int d, double eps_scaled,
                                 const SpectraplexParams& params);

SpectraplexResult solve_spectraplex(const OperatorSet& ops,
                                    const SpectraplexParams& params);

// Second-order finite-difference comparison of the von Neumann and vector
// entropy Hessians for a PSD partition of the identity:
//   d^2 H(Y)[M, M] >= d^2 h(y)[m, m],  y = A*(Y), m = A*(M).
struct DominationCheck {
  double lhs = 0.0;  // matrix side at the smallest step
  double rhs = 0.0;  // vector side at the smallest step
  double excess = 0.0;  // max over steps of rhs - lhs - tol max(1, |lhs|)
  bool violated = false;  // excess > 0 at every step
};
DominationCheck check_entropy_domination(const std::vector<Mat>& partition,
                                         const Mat& Y, const Mat& M);

// (V_Y(Y + t M) + V_Y(Y - t M)) / t^2 for the negated von Neumann entropy.
double vn_hessian_fd(const Mat& Y, const Mat& M, double t);

// A_i = S^{-1/2} P_i S^{-1/2} for random PSD P_i of the given rank, so the
// A_i are PSD and sum to the identity.
std::vector<Mat> random_psd_partition(Rng& rng, int d, int count, int rank);

}  // namespace acsolve
