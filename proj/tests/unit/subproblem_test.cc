#include "acsolve/subproblem.h"

#include <gtest/gtest.h>

#include <cmath>

#include "acsolve/sampling.h"

namespace acsolve {
namespace {

TEST(BestResponseTest, Examples) {
  Vec x = best_response_x(Vec{{1.0, -4.0, 0.0}}, Vec::Ones(3));
  EXPECT_EQ(x, (Vec{{-0.5, 1.0, 0.0}}));
  EXPECT_EQ(best_response_x(Vec::Zero(4), Vec{{0.0, 1.0, 2.0, 3.0}}), Vec::Zero(4));
  EXPECT_EQ(best_response_x(Vec{{3.0}}, Vec{{0.0}})[0], -1.0);
  EXPECT_EQ(best_response_x(Vec{{-3.0}}, Vec{{0.0}})[0], 1.0);
}

TEST(BestResponseTest, FirstOrderCondition) {
  Rng rng(4);
  double worst = -1e300;
  for (int t = 0; t < 200; ++t) {
    Vec v = 3 * gaussian(rng, 6);
    Vec q = uniform_box(rng, 6, 0, 2);
    if (t % 5 == 0) q[t % 6] = 0;
    Vec x = best_response_x(v, q);
    for (int k = 0; k < 100; ++k) {
      Vec u = uniform_box(rng, 6);
      worst = std::max(worst, (v + 2 * q.cwiseProduct(x)).dot(x - u));
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(BestResponseTest, MinimizesAgainstGrid) {
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    double v = 4 * gaussian(rng, 1)[0], q = uniform_box(rng, 1, 0, 2)[0];
    double best = 1e300;
    for (int k = 0; k <= 20000; ++k) {
      double x = -1 + k / 10000.0;
      best = std::min(best, v * x + q * x * x);
    }
    double x = best_response_x(Vec{{v}}, Vec{{q}})[0];
    EXPECT_LE(v * x + q * x * x, best + 1e-12);
  }
}

TEST(EllVTest, Examples) {
  EXPECT_DOUBLE_EQ(ell_v(Vec{{1.0}}, Vec{{1.0}}), -0.25);
  EXPECT_DOUBLE_EQ(ell_v(Vec{{-4.0}}, Vec{{1.0}}), -3.0);
  EXPECT_EQ(ell_v(Vec::Zero(3), Vec::Ones(3)), 0.0);
}

TEST(EllVTest, ConsistentWithMinimizer) {
  Rng rng(9);
  for (int t = 0; t < 1000; ++t) {
    Vec v = 3 * gaussian(rng, 5);
    Vec q = uniform_box(rng, 5, 0, 2);
    if (t % 4 == 0) q[t % 5] = 0;
    Vec x = best_response_x(v, q);
    EXPECT_NEAR(ell_v(v, q), v.dot(x) + q.dot(x.cwiseProduct(x)), 1e-12);
  }
}

TEST(SubproblemTest, ZeroForcingReturnsCenter) {
  Rng rng(10);
  SparseMatrix A = SparseMatrix::FromDense(uniform_matrix(rng, 4, 5));
  SubproblemResult res = minimize_subproblem(A, Vec::Zero(4), Vec::Zero(5), 2.0, 1e-14);
  EXPECT_TRUE(res.converged);
  EXPECT_LE(res.x.norm(), 1e-15);
  EXPECT_LE((res.y - Vec::Constant(5, 0.2)).norm(), 1e-15);
}

TEST(SubproblemTest, MatchesGridSearchOnTwoCoordinates) {
  // n = 1, d = 2: F(x, y1) evaluated on a 1e-4 grid over y1, with the inner
  // box minimization done by ternary search on the convex function of x.
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    Mat dense = uniform_matrix(rng, 1, 2);
    SparseMatrix A = SparseMatrix::FromDense(dense);
    Vec vx = 2 * gaussian(rng, 1), vy = gaussian(rng, 2);
    auto F = [&](double x, double y1) {
      double y2 = 1 - y1;
      double ent = (y1 > 0 ? y1 * std::log(y1) : 0) + (y2 > 0 ? y2 * std::log(y2) : 0);
      return vx[0] * x + vy[0] * y1 + vy[1] * y2 +
             (std::abs(dense(0, 0)) * y1 + std::abs(dense(0, 1)) * y2) * x * x + 2 * ent;
    };
    double best = 1e300;
    for (int k = 0; k <= 10000; ++k) {
      double y1 = k / 10000.0;
      double lo = -1, hi = 1;
      for (int it = 0; it < 100; ++it) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (F(m1, y1) < F(m2, y1)) hi = m2; else lo = m1;
      }
      best = std::min(best, F((lo + hi) / 2, y1));
    }
    SubproblemResult res = minimize_subproblem(A, vx, vy, 2.0, 1e-15);
    EXPECT_NEAR(res.objective, best, 1e-3);
    EXPECT_NEAR(F(res.x[0], res.y[0]), res.objective, 1e-12);
  }
}

TEST(SubproblemTest, GeometricDecrease) {
  Rng rng(13);
  double total = 0;
  int count = 0;
  for (int trial = 0; trial < 20; ++trial) {
    SparseMatrix A = SparseMatrix::FromDense(uniform_matrix(rng, 10, 10));
    Vec vx = 2 * gaussian(rng, 10), vy = 2 * gaussian(rng, 10);
    SubproblemResult longrun = minimize_subproblem(A, vx, vy, 2.0, 1e-300, 2000);
    double fstar = longrun.objective;
    SubproblemResult res = minimize_subproblem(A, vx, vy, 2.0, 1e-300, 8);
    for (size_t k = 0; k + 1 < res.objectives.size(); ++k) {
      double g0 = res.objectives[k] - fstar, g1 = res.objectives[k + 1] - fstar;
      if (g0 < 1e-10) break;
      total += g1 / g0;
      ++count;
    }
  }
  ASSERT_GT(count, 0);
  EXPECT_LE(total / count, 0.55);
}

TEST(SubproblemTest, RelativeSmoothnessAndStrongConvexity) {
  Rng rng(14);
  double worst_smooth = 0, worst_convex = 0;
  for (int t = 0; t < 2000; ++t) {
    SparseMatrix A = SparseMatrix::FromDense(uniform_matrix(rng, 4, 4));
    Vec vx = 2 * gaussian(rng, 4), vy = gaussian(rng, 4);
    Vec y = interior_simplex(rng, 4, 0.05), yp = interior_simplex(rng, 4, 0.05);
    double vf = subproblem_objective(A, vx, vy, 2.0, yp) -
                subproblem_objective(A, vx, vy, 2.0, y) -
                subproblem_subgradient(A, vx, vy, 2.0, y).dot(yp - y);
    double vh = entropy_bregman(1.0, y, yp);
    worst_smooth = std::min(worst_smooth, 2 * vh - vf);
    worst_convex = std::min(worst_convex, vf - vh);
  }
  EXPECT_GE(worst_smooth, -1e-9);
  EXPECT_GE(worst_convex, -1e-9);
}

TEST(SubproblemTest, ReportsNonConvergence) {
  Rng rng(15);
  SparseMatrix A = SparseMatrix::FromDense(uniform_matrix(rng, 10, 10));
  SubproblemResult res =
      minimize_subproblem(A, 3 * gaussian(rng, 10), 3 * gaussian(rng, 10), 2.0, 1e-300, 3);
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.iterations, 3);
  EXPECT_EQ(res.objectives.size(), 4u);
}

}  // namespace
}  // namespace acsolve
