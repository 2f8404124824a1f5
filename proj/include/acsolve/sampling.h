#pragma once

#include <random>

#include "acsolve/core.h"

namespace acsolve {

using Rng = std::mt19937_64;

Vec uniform_box(Rng& rng, int n, double lo = -1.0, double hi = 1.0);
// Symmetric Dirichlet(concentration) draw.
Vec dirichlet(Rng& rng, int d, double concentration = 1.0);
// Dirichlet draw mixed with uniform so no coordinate falls below floor / d.
Vec interior_simplex(Rng& rng, int d, double floor = 1e-3);
Vec gaussian(Rng& rng, int n);

// Interior point: x uniform in the box, y an interior Dirichlet draw.
PrimalDualPoint random_point(Rng& rng, int n, int d);
// Point near base: x moved by at most scale and clipped; log-weights moved by
// at most scale.
PrimalDualPoint perturb(Rng& rng, const PrimalDualPoint& base, double scale);

// Dense n x d matrix with entries uniform in [lo, hi].
Mat uniform_matrix(Rng& rng, int n, int d, double lo = -1.0, double hi = 1.0);
// Random symmetric d x d matrix with Gaussian entries scaled by 1/sqrt(d).
Mat random_symmetric(Rng& rng, int d);
// Random trace-one positive definite matrix: Wishart plus a floor times I.
Mat random_density(Rng& rng, int d, double floor = 0.05);

BoxSimplexInstance random_instance(Rng& rng, int n, int d);

}  // namespace acsolve
