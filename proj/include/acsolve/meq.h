#pragma once

#include <cstdint>
#include <vector>

#include "acsolve/core.h"
#include "acsolve/sampling.h"

namespace acsolve {

// Degree constant of the exponential approximation, calibrated so the
// interpolant error on [0, R] stays below half the requested accuracy over
// R in [0.5, 500] and accuracies in [1e-12, 0.5] (tools/calibrate_poly.cc).
inline constexpr double kPolyDegreeConstant = 0.95;

// Spectral helpers for symmetric matrices.
Mat spectral_abs(const Mat& A);
Mat exp_symmetric(const Mat& A);
// exp(M) / Tr exp(M), shifted by the top eigenvalue for stability.
Mat exp_normalized(const Mat& M);
double log_trace_exp(const Mat& M);
double lambda_max(const Mat& M);

// <A_i, exp(M) / Tr exp(M)> for each i.
Vec meq_exact(const std::vector<Mat>& mats, const Mat& M);

struct EigenEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Block Krylov estimate of lambda_max of a PSD matrix. The Rayleigh-Ritz value
// never exceeds the true value; with probability 1 - delta it is within a
// factor 1 - eps. converged is false when the iteration budget ran out while
// the estimate was still moving.
EigenEstimate top_eigenvalue(const Mat& M_psd, double eps, double delta,
                             uint64_t seed);
// Power iteration with Rayleigh quotients; a slower baseline.
EigenEstimate top_eigenvalue_power(const Mat& M_psd, double eps, double delta,
                                   uint64_t seed);

// Chebyshev interpolant of exp(-t) on [0, R] with uniform error <= eps.
class ExpPolynomial {
 public:
  ExpPolynomial(double R, double eps, double c_degree = kPolyDegreeConstant);
  static ExpPolynomial with_degree(double R, int degree);

  static int degree_for(double R, double eps, double c_degree = kPolyDegreeConstant);
  int degree() const { return static_cast<int>(coef_.size()) - 1; }
  double R() const { return R_; }
  double operator()(double t) const;
  // p(Mt) V for symmetric 0 <= Mt <= R I.
  Mat apply(const Mat& Mt, const Mat& V) const;
  Mat matrix(const Mat& Mt) const;

 private:
  ExpPolynomial(double R, int degree);

  double R_;
  std::vector<double> coef_;
};

Vec poly_exp_apply(const Mat& Mtilde, double R, double eps_tilde, const Vec& v);

// ceil(c_jl eps^-2 ln(d / delta)).
int sketch_rows(int d, double eps, double delta, double c_jl = 24.0);
// k x d matrix whose rows are independent uniform unit vectors scaled by
// sqrt(d / k), so E ||Q v||^2 = ||v||^2.
Mat jl_sketch(int k, int d, Rng& rng);

struct ShiftPlan {
  double shift = 0.0;  // lambda_hat >= lambda_max(M)
  Mat Mtilde;          // lambda_hat I - M
  double bound = 0.0;  // Mtilde <= bound I
  bool converged = true;
};

// lambda_hat = (Ritz estimate of lambda_max(M + 2R I) at accuracy 1/(3R)) + 1 - 2R.
ShiftPlan shift_plan(const Mat& M, double R, double delta, uint64_t seed);

struct TraceEstimate {
  double value = 0.0;
  double log_value = 0.0;
  double shift = 0.0;
  bool converged = true;
};

// Multiplicative eps estimate of Tr exp(M) for ||M|| <= R.
TraceEstimate approx_trace_exp(const Mat& M, double eps, double delta, double R,
                               uint64_t seed);

struct MeqParams {
  double eps_mul = 0.2;
  double delta = 0.1;
  double gamma_add = 1e-3;
  double R = 1.0;
  double c_jl = 24.0;
  uint64_t seed = 1;
  // Test hooks: rows e_1..e_d instead of a random sketch, and the exact
  // exponential in place of the polynomial.
  bool identity_sketch = false;
  bool exact_exponential = false;
};

// Estimates <A_i, exp(M) / Tr exp(M)> with
//   |V_i - <A_i, Y>| <= eps <|A_i|, Y> + gamma Tr|A_i|
// for all i at once with probability 1 - delta.
Vec meq_sketched(const std::vector<Mat>& mats, const Mat& M,
                 const MeqParams& params);

}  // namespace acsolve
