#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "acsolve/core.h"
#include "acsolve/sampling.h"

namespace acsolve {

// Points of a product domain are stored flat; simplex blocks hold
// probabilities.
struct MonotoneOperator {
  int dim = 0;
  std::function<Vec(const Vec&)> eval;

  Vec operator()(const Vec& z) const { return eval(z); }
};

// g(x, y) = (M y, -M^T x) for min over x in the simplex, max over y.
MonotoneOperator bilinear_game_operator(const Mat& M);

// g(x, y) = (A y + c, b - A^T x) over [x; y].
MonotoneOperator box_simplex_operator(const BoxSimplexInstance& inst);

// Regularizer together with its exact proximal step
//   prox(z, g) = argmin over w of <g, w> + V_z(w).
class Regularizer {
 public:
  virtual ~Regularizer() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& z) const = 0;
  // V_z(w).
  virtual double divergence(const Vec& z, const Vec& w) const = 0;
  virtual Vec prox(const Vec& z, const Vec& g) const = 0;
  virtual Vec center() const = 0;
  // A point in the relative interior of the domain.
  virtual Vec sample(Rng& rng) const = 0;
  // A nearby interior point; size is a relative step.
  virtual Vec perturb(Rng& rng, const Vec& z, double size) const = 0;
};

// Argmin over the simplex of <g, w> + scale KL(w || y), in log domain.
Vec entropy_prox(const Vec& y, const Vec& g, double scale);

// Sum of independent blocks: scale * sum w log w on a simplex, or
// (scale / 2) ||x||^2 on [-1, 1]^k.
class SeparableRegularizer : public Regularizer {
 public:
  SeparableRegularizer& add_entropy(int size, double scale);
  SeparableRegularizer& add_box_l2(int size, double scale);

  int dim() const override { return dim_; }
  double value(const Vec& z) const override;
  double divergence(const Vec& z, const Vec& w) const override;
  Vec prox(const Vec& z, const Vec& g) const override;
  Vec center() const override;
  Vec sample(Rng& rng) const override;
  Vec perturb(Rng& rng, const Vec& z, double size) const override;

 private:
  struct Block {
    bool simplex;
    int offset;
    int size;
    double scale;
  };
  std::vector<Block> blocks_;
  int dim_ = 0;
};

// r(x, y) = <|A| y, x^2> + alpha sum y log y over [x; y]; its prox runs the
// subproblem solver until the objective decrease falls to tol.
class BoxSimplexRegularizer : public Regularizer {
 public:
  BoxSimplexRegularizer(SparseMatrix A, double alpha, double tol = 1e-300);

  int dim() const override { return A_.rows() + A_.cols(); }
  double value(const Vec& z) const override;
  double divergence(const Vec& z, const Vec& w) const override;
  Vec prox(const Vec& z, const Vec& g) const override;
  Vec center() const override;
  Vec sample(Rng& rng) const override;
  Vec perturb(Rng& rng, const Vec& z, double size) const override;

  PrimalDualPoint split(const Vec& z) const;
  Vec join(const PrimalDualPoint& p) const;

 private:
  SparseMatrix A_;
  double alpha_;
  double tol_;
};

struct MirrorProxResult {
  Vec average;
  std::vector<Vec> iterates;  // w_0, ..., w_{T-1}
  // For each comparator u: (1/T) sum <g(w_t), w_t - u> and 2 V_{z0}(u) / (eta T).
  std::vector<double> regret;
  std::vector<double> bound;
  // Largest value of <eta g(w_t), w_t - u> - 2 V_{z_t}(u) + 2 V_{z_{t+1}}(u)
  // over steps and comparators.
  double max_step_violation = 0.0;
  bool ok = true;
};

// w_t = prox(z_t, eta g(z_t)), z_{t+1} = prox(z_t, (eta / 2) g(w_t)).
// ok reports whether every regret is within its bound plus 1e-8 and every
// per-step violation is at most 1e-8.
MirrorProxResult relaxed_mirror_prox(const MonotoneOperator& g,
                                     const Regularizer& r, const Vec& z0,
                                     double eta, int T,
                                     const std::vector<Vec>& comparators);

struct RrlReport {
  int samples = 0;
  // Max over triples of lhs - rhs for each form; <= 0 means no violation.
  double max_violation_rrl = -1e300;
  double max_violation_rl = -1e300;
  double max_violation_area = -1e300;
  // Triples where the stricter form passed but the relaxed one failed.
  int rl_implication_failures = 0;
  int area_implication_failures = 0;
};

// Samples triples (z, z', z+) and evaluates
//   relaxed:  eta <g(z') - g(z), z' - z+> <= V_z(z') + V_z'(z+) + V_z(z+)
//   relative: eta <g(z') - g(z), z' - z+> <= V_z(z') + V_z'(z+)
//   area:     eta <g(z') - g(z), z' - z+> <= r(z) + r(z') + r(z+) - 3 r(c)
// with c the centroid. Half the triples are independent draws, half are
// perturbations of a common base point.
RrlReport check_rrl(const MonotoneOperator& g, const Regularizer& r,
                    double eta, int samples, Rng& rng);

// Min over sampled pairs of <g(w) - g(z), w - z>.
double check_monotone(const MonotoneOperator& g, const Regularizer& r,
                      int samples, Rng& rng);

}  // namespace acsolve
