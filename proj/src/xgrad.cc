#include "acsolve/xgrad.h"

#include <cmath>
#include <stdexcept>

#include "acsolve/subproblem.h"

namespace acsolve {

namespace {

void RequireDim(const Vec& v, int dim, const char* what) {
  if (v.size() != dim) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

double EntropyValue(const Vec& w) {
  double v = 0.0;
  for (double p : w) {
    if (p > 0.0) v += p * std::log(p);
  }
  return v;
}

Vec PerturbSimplex(Rng& rng, const Vec& y, double size) {
  Vec logy = y.array().max(1e-300).log().matrix() + size * gaussian(rng, y.size());
  return SoftmaxFromLog(logy);
}

Vec PerturbBox(Rng& rng, const Vec& x, double size) {
  return (x + size * uniform_box(rng, x.size())).cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace

MonotoneOperator bilinear_game_operator(const Mat& M) {
  const int n = M.rows(), d = M.cols();
  return {n + d, [M, n, d](const Vec& z) {
            Vec g(n + d);
            g.head(n) = M * z.tail(d);
            g.tail(d) = -M.transpose() * z.head(n);
            return g;
          }};
}

MonotoneOperator box_simplex_operator(const BoxSimplexInstance& inst) {
  const int n = inst.n(), d = inst.d();
  return {n + d, [inst, n, d](const Vec& z) {
            Gradient g = gradient(inst, z.head(n), z.tail(d));
            Vec out(n + d);
            out << g.gx, g.gy;
            return out;
          }};
}

Vec entropy_prox(const Vec& y, const Vec& g, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("entropy_prox: scale must be positive");
  RequireDim(g, y.size(), "entropy_prox");
  Vec logw(y.size());
  for (int j = 0; j < y.size(); ++j) {
    logw[j] = y[j] > 0.0 ? std::log(y[j]) - g[j] / scale
                         : -std::numeric_limits<double>::infinity();
  }
  return SoftmaxFromLog(logw);
}

SeparableRegularizer& SeparableRegularizer::add_entropy(int size, double scale) {
  blocks_.push_back({true, dim_, size, scale});
  dim_ += size;
  return *this;
}

SeparableRegularizer& SeparableRegularizer::add_box_l2(int size, double scale) {
  blocks_.push_back({false, dim_, size, scale});
  dim_ += size;
  return *this;
}

double SeparableRegularizer::value(const Vec& z) const {
  RequireDim(z, dim_, "regularizer");
  double v = 0.0;
  for (const Block& b : blocks_) {
    Vec w = z.segment(b.offset, b.size);
    v += b.simplex ? b.scale * EntropyValue(w) : 0.5 * b.scale * w.squaredNorm();
  }
  return v;
}

double SeparableRegularizer::divergence(const Vec& z, const Vec& w) const {
  RequireDim(z, dim_, "regularizer");
  RequireDim(w, dim_, "regularizer");
  double v = 0.0;
  for (const Block& b : blocks_) {
    Vec zb = z.segment(b.offset, b.size), wb = w.segment(b.offset, b.size);
    v += b.simplex ? entropy_bregman(b.scale, zb, wb)
                   : 0.5 * b.scale * (wb - zb).squaredNorm();
  }
  return v;
}

Vec SeparableRegularizer::prox(const Vec& z, const Vec& g) const {
  RequireDim(z, dim_, "prox");
  RequireDim(g, dim_, "prox");
  Vec out(dim_);
  for (const Block& b : blocks_) {
    Vec zb = z.segment(b.offset, b.size), gb = g.segment(b.offset, b.size);
    out.segment(b.offset, b.size) =
        b.simplex ? entropy_prox(zb, gb, b.scale)
                  : Vec((zb - gb / b.scale).cwiseMax(-1.0).cwiseMin(1.0));
  }
  return out;
}

Vec SeparableRegularizer::center() const {
  Vec out = Vec::Zero(dim_);
  for (const Block& b : blocks_) {
    if (b.simplex) out.segment(b.offset, b.size).setConstant(1.0 / b.size);
  }
  return out;
}

Vec SeparableRegularizer::sample(Rng& rng) const {
  Vec out(dim_);
  for (const Block& b : blocks_) {
    out.segment(b.offset, b.size) =
        b.simplex ? interior_simplex(rng, b.size) : uniform_box(rng, b.size);
  }
  return out;
}

Vec SeparableRegularizer::perturb(Rng& rng, const Vec& z, double size) const {
  Vec out(dim_);
  for (const Block& b : blocks_) {
    Vec zb = z.segment(b.offset, b.size);
    out.segment(b.offset, b.size) =
        b.simplex ? PerturbSimplex(rng, zb, size) : PerturbBox(rng, zb, size);
  }
  return out;
}

BoxSimplexRegularizer::BoxSimplexRegularizer(SparseMatrix A, double alpha,
                                             double tol)
    : A_(std::move(A)), alpha_(alpha), tol_(tol) {
  if (!(alpha >= 0.5)) {
    throw std::invalid_argument("BoxSimplexRegularizer: alpha must be >= 1/2");
  }
}

PrimalDualPoint BoxSimplexRegularizer::split(const Vec& z) const {
  RequireDim(z, dim(), "regularizer");
  return PrimalDualPoint::FromSimplex(z.head(A_.rows()), z.tail(A_.cols()));
}

Vec BoxSimplexRegularizer::join(const PrimalDualPoint& p) const {
  Vec out(dim());
  out << p.x, p.y();
  return out;
}

double BoxSimplexRegularizer::value(const Vec& z) const {
  return regularizer(A_, alpha_, z.head(A_.rows()), z.tail(A_.cols()));
}

double BoxSimplexRegularizer::divergence(const Vec& z, const Vec& w) const {
  return bregman(A_, alpha_, split(z), split(w));
}

Vec BoxSimplexRegularizer::prox(const Vec& z, const Vec& g) const {
  RequireDim(g, dim(), "prox");
  const int n = A_.rows(), d = A_.cols();
  PrimalDualPoint p = split(z);
  Vec y = p.y();
  // <g, w> + r(w) - <grad r(z), w>; the constant in grad_y r drops out on
  // the simplex.
  Vec vx = g.head(n) - 2.0 * p.x.cwiseProduct(A_.abs_times(y));
  Vec vy = g.tail(d) - A_.abs_transpose_times(p.x.cwiseProduct(p.x)) -
           alpha_ * p.normalized_logy();
  SubproblemResult res = minimize_subproblem(A_, vx, vy, alpha_, tol_, 1000);
  Vec out(n + d);
  out << res.x, res.y;
  return out;
}

Vec BoxSimplexRegularizer::center() const {
  return join(PrimalDualPoint::Center(A_.rows(), A_.cols()));
}

Vec BoxSimplexRegularizer::sample(Rng& rng) const {
  return join(random_point(rng, A_.rows(), A_.cols()));
}

Vec BoxSimplexRegularizer::perturb(Rng& rng, const Vec& z, double size) const {
  return join(acsolve::perturb(rng, split(z), size));
}

MirrorProxResult relaxed_mirror_prox(const MonotoneOperator& g,
                                     const Regularizer& r, const Vec& z0,
                                     double eta, int T,
                                     const std::vector<Vec>& comparators) {
  if (!(eta > 0.0) || T < 1) {
    throw std::invalid_argument("relaxed_mirror_prox: need eta > 0 and T >= 1");
  }
  RequireDim(z0, r.dim(), "relaxed_mirror_prox");
  const size_t m = comparators.size();
  MirrorProxResult res;
  res.regret.assign(m, 0.0);
  res.max_step_violation = -std::numeric_limits<double>::infinity();
  Vec z = z0;
  Vec sum = Vec::Zero(z0.size());
  std::vector<double> div_z(m);
  for (size_t k = 0; k < m; ++k) div_z[k] = r.divergence(z, comparators[k]);
  for (int t = 0; t < T; ++t) {
    Vec w = r.prox(z, eta * g(z));
    Vec gw = g(w);
    Vec znext = r.prox(z, 0.5 * eta * gw);
    for (size_t k = 0; k < m; ++k) {
      double pairing = gw.dot(w - comparators[k]);
      double div_next = r.divergence(znext, comparators[k]);
      res.regret[k] += pairing;
      res.max_step_violation = std::max(
          res.max_step_violation, eta * pairing - 2.0 * div_z[k] + 2.0 * div_next);
      div_z[k] = div_next;
    }
    sum += w;
    res.iterates.push_back(std::move(w));
    z = std::move(znext);
  }
  res.average = sum / T;
  for (size_t k = 0; k < m; ++k) {
    res.regret[k] /= T;
    res.bound.push_back(2.0 * r.divergence(z0, comparators[k]) / (eta * T));
    if (res.regret[k] > res.bound[k] + 1e-8) res.ok = false;
  }
  if (m > 0 && res.max_step_violation > 1e-8) res.ok = false;
  return res;
}

RrlReport check_rrl(const MonotoneOperator& g, const Regularizer& r,
                    double eta, int samples, Rng& rng) {
  static constexpr double kSizes[] = {1e-1, 1e-2, 1e-3};
  RrlReport rep;
  rep.samples = samples;
  for (int s = 0; s < samples; ++s) {
    Vec z, zp, zplus;
    if (s % 2 == 0) {
      z = r.sample(rng);
      zp = r.sample(rng);
      zplus = r.sample(rng);
    } else {
      Vec base = r.sample(rng);
      double size = kSizes[(s / 2) % 3];
      z = r.perturb(rng, base, size);
      zp = r.perturb(rng, base, size);
      zplus = r.perturb(rng, base, size);
    }
    double lhs = eta * (g(zp) - g(z)).dot(zp - zplus);
    double v1 = r.divergence(z, zp), v2 = r.divergence(zp, zplus),
           v3 = r.divergence(z, zplus);
    Vec c = (z + zp + zplus) / 3.0;
    double area = r.value(z) + r.value(zp) + r.value(zplus) - 3.0 * r.value(c);
    double rrl = lhs - (v1 + v2 + v3);
    double rl = lhs - (v1 + v2);
    double ac = lhs - area;
    rep.max_violation_rrl = std::max(rep.max_violation_rrl, rrl);
    rep.max_violation_rl = std::max(rep.max_violation_rl, rl);
    rep.max_violation_area = std::max(rep.max_violation_area, ac);
    const double slack = 1e-10 * (1.0 + std::abs(lhs));
    if (rl <= 0.0 && rrl > slack) ++rep.rl_implication_failures;
    if (ac <= 0.0 && rrl > slack) ++rep.area_implication_failures;
  }
  return rep;
}

double check_monotone(const MonotoneOperator& g, const Regularizer& r,
                      int samples, Rng& rng) {
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vec z = r.sample(rng);
    Vec w = s % 2 ? r.perturb(rng, z, 1e-2) : r.sample(rng);
    worst = std::min(worst, (g(w) - g(z)).dot(w - z));
  }
  return worst;
}

}  // namespace acsolve
