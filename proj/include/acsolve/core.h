#pragma once

#include <cstdint>
#include <optional>

#include "acsolve/sparse_matrix.h"

namespace acsolve {

// min over x in [-1,1]^n, max over y in the simplex, of
//   f(x, y) = x^T A y - b^T y + c^T x.
struct BoxSimplexInstance {
  SparseMatrix A;
  Vec b;  // length d
  Vec c;  // length n
  double L = 0.0;  // ||A||_{1->1}

  // Validates shapes and finiteness and precomputes L.
  static BoxSimplexInstance Make(SparseMatrix A, Vec b, Vec c);
  int n() const { return A.rows(); }
  int d() const { return A.cols(); }
};

// A box point with a simplex point stored as log-weights. The weights need
// not be normalized; y() normalizes after subtracting the max. A log-weight
// of -inf encodes an exact zero coordinate.
struct PrimalDualPoint {
  Vec x;
  Vec logy;

  // (0, uniform), the minimizer of every regularizer in the family.
  static PrimalDualPoint Center(int n, int d);
  static PrimalDualPoint FromSimplex(const Vec& x, const Vec& y);

  Vec y() const;
  // log of y(), i.e. logy shifted so that the weights sum to one.
  Vec normalized_logy() const;
};

struct SolverParams {
  double alpha = 2.0;
  double beta = 2.0;
  double gamma = 4.0;
  double eta = 1.0 / 3.0;
  double epsilon = 0.0;
  std::optional<long> max_iters;
  std::uint64_t seed = 20240601;
  long trace_every = 0;  // 0 selects ceil(T / 100)
  bool early_exit = true;
};

// log(sum(exp(v))) with the max shift; -inf for an all -inf vector.
double LogSumExp(const Vec& v);
Vec SoftmaxFromLog(const Vec& logw);

double lipschitz_1to1(const SparseMatrix& A);

struct Gradient {
  Vec gx;
  Vec gy;
};
// g(x, y) = (A y + c, b - A^T x).
Gradient gradient(const BoxSimplexInstance& inst, const Vec& x, const Vec& y);
Gradient gradient(const BoxSimplexInstance& inst, const PrimalDualPoint& z);

// Negative entropy sum y log y with 0 log 0 = 0.
double neg_entropy(const Vec& y);

// r(x, y) = <|A| y, x^2> + alpha * neg_entropy(y).
double regularizer(const SparseMatrix& A, double alpha, const Vec& x,
                   const Vec& y);
double regularizer(const SparseMatrix& A, double alpha,
                   const PrimalDualPoint& z);

// Gradient of the regularizer; requires y > 0.
Gradient regularizer_gradient(const SparseMatrix& A, double alpha,
                              const Vec& x, const Vec& y);

// V_z(z') for the regularizer above, evaluated in a cancellation-free form:
//   <|A| y, (x' - x)^2> + <|A|(y' - y), x'^2 - x^2> + alpha KL(y' || y).
double bregman(const SparseMatrix& A, double alpha, const PrimalDualPoint& z,
               const PrimalDualPoint& zp);

// beta * KL(y' || y) for simplex points; +inf when y' puts mass where y has
// none.
double entropy_bregman(double beta, const Vec& y, const Vec& yp);
// Same, from log-weights (normalized internally).
double entropy_bregman_log(double beta, const Vec& logy, const Vec& logyp);

// f(x, y).
double game_value(const BoxSimplexInstance& inst, const Vec& x, const Vec& y);

// [c^T x + max_j (A^T x - b)_j] + [||A y + c||_1 + b^T y].
double duality_gap(const BoxSimplexInstance& inst, const Vec& x, const Vec& y);
double duality_gap(const BoxSimplexInstance& inst, const PrimalDualPoint& z);

// min over y in the simplex, max over x in the box, of
//   x^T M y + p^T y + q^T x.
struct SimplexMinGame {
  SparseMatrix M;  // n x d
  Vec p;           // length d
  Vec q;           // length n
};

// Negates the payoff and swaps which player is named first, giving
// A = -M, b = p, c = -q. Points map unchanged: (x, y) is an eps-saddle of
// one game exactly when it is an eps-saddle of the other, and the game
// values are negatives of each other.
BoxSimplexInstance dualize(const SimplexMinGame& game);
SimplexMinGame dualize(const BoxSimplexInstance& inst);

// Payoff of the simplex-min game at (x, y).
double game_value(const SimplexMinGame& game, const Vec& x, const Vec& y);

}  // namespace acsolve
