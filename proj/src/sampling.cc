#include "acsolve/sampling.h"

#include <algorithm>
#include <cmath>

namespace acsolve {

Vec uniform_box(Rng& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Vec dirichlet(Rng& rng, int d, double concentration) {
  std::gamma_distribution<double> g(concentration, 1.0);
  Vec v(d);
  for (int j = 0; j < d; ++j) v[j] = g(rng);
  double s = v.sum();
  if (s <= 0.0) return Vec::Constant(d, 1.0 / d);
  return v / s;
}

Vec interior_simplex(Rng& rng, int d, double floor) {
  Vec y = dirichlet(rng, d);
  return (1.0 - floor) * y + Vec::Constant(d, floor / d);
}

Vec gaussian(Rng& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

PrimalDualPoint random_point(Rng& rng, int n, int d) {
  return PrimalDualPoint::FromSimplex(uniform_box(rng, n),
                                      interior_simplex(rng, d));
}

PrimalDualPoint perturb(Rng& rng, const PrimalDualPoint& base, double scale) {
  PrimalDualPoint p = base;
  p.x = (base.x + scale * uniform_box(rng, static_cast<int>(base.x.size())))
            .cwiseMax(-1.0)
            .cwiseMin(1.0);
  p.logy = base.normalized_logy() +
           scale * uniform_box(rng, static_cast<int>(base.logy.size()));
  p.logy = p.normalized_logy();
  return p;
}

Mat uniform_matrix(Rng& rng, int n, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = u(rng);
  }
  return m;
}

Mat random_symmetric(Rng& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      m(i, j) = g(rng) / std::sqrt(static_cast<double>(d));
      m(j, i) = m(i, j);
    }
  }
  return m;
}

Mat random_density(Rng& rng, int d, double floor) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat G(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) G(i, j) = g(rng);
  }
  Mat W = G * G.transpose();
  W /= W.trace();
  return (1.0 - floor) * W + (floor / d) * Mat::Identity(d, d);
}

BoxSimplexInstance random_instance(Rng& rng, int n, int d) {
  return BoxSimplexInstance::Make(SparseMatrix::FromDense(uniform_matrix(rng, n, d)),
                                  uniform_box(rng, d), uniform_box(rng, n));
}

}  // namespace acsolve
