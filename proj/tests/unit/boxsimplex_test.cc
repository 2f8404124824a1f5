#include "acsolve/boxsimplex.h"

#include <gtest/gtest.h>

#include <cmath>

#include "acsolve/sampling.h"
#include "acsolve/subproblem.h"

namespace acsolve {
namespace {

Vec V2(double a, double b) { return Vec{{a, b}}; }

PrimalDualPoint RandomComparator(Rng& rng, int n, int d, int t) {
  Vec ux = t % 2 ? uniform_box(rng, n) : Vec(uniform_box(rng, n).array().sign());
  Vec uy = t % 3 == 0 ? Vec(Vec::Unit(d, t % d)) : dirichlet(rng, d, 0.5);
  return PrimalDualPoint::FromSimplex(ux, uy);
}

double Pairing(const Vec& vx, const Vec& vy, const PrimalDualPoint& a,
               const PrimalDualPoint& b) {
  return vx.dot(a.x - b.x) + vy.dot(a.y() - b.y());
}

TEST(GradStepOracleTest, ZeroForcingIsFixedPoint) {
  Rng rng(1);
  SparseMatrix A = SparseMatrix::FromDense(uniform_matrix(rng, 3, 4));
  PrimalDualPoint z0 = PrimalDualPoint::Center(3, 4);
  PrimalDualPoint zp = grad_step_oracle(A, z0, Vec::Zero(3), Vec::Zero(4), 2, 2);
  EXPECT_LE(zp.x.norm(), 1e-15);
  EXPECT_LE((zp.y() - z0.y()).norm(), 1e-15);
}

TEST(GradStepOracleTest, HandEvaluatedExample) {
  SparseMatrix I = SparseMatrix::Identity(2);
  PrimalDualPoint zp = grad_step_oracle(I, PrimalDualPoint::Center(2, 2), V2(1, -1),
                                        Vec::Zero(2), 2, 2);
  EXPECT_EQ(zp.x, V2(-1, 1));
  EXPECT_LE((zp.y() - V2(0.5, 0.5)).norm(), 1e-15);
}

TEST(GradStepOracleTest, ZeroCurvatureRow) {
  Mat dense = Mat::Zero(2, 2);
  dense(0, 0) = 1;
  PrimalDualPoint zp =
      grad_step_oracle(SparseMatrix::FromDense(dense), PrimalDualPoint::Center(2, 2),
                       V2(0.1, 3.0), Vec::Zero(2), 2, 2);
  EXPECT_EQ(zp.x[1], -1.0);
  EXPECT_TRUE(zp.x.allFinite());
}

TEST(GradStepOracleTest, ContractSampled) {
  Rng rng(2);
  double worst = 0;
  for (int t = 0; t < 4000; ++t) {
    BoxSimplexInstance inst = random_instance(rng, 4, 5);
    SparseMatrix A = inst.A.scaled(1.0 / inst.L);
    PrimalDualPoint z = random_point(rng, 4, 5);
    double scale = t % 4 == 0 ? 5.0 : 0.5;
    Vec vx = scale * gaussian(rng, 4), vy = scale * gaussian(rng, 5);
    double alpha = t % 2 ? 2.0 : 0.5, beta = t % 2 ? 2.0 : 1.0;
    PrimalDualPoint zp = grad_step_oracle(A, z, vx, vy, alpha, beta);
    for (int k = 0; k < 3; ++k) {
      PrimalDualPoint u = RandomComparator(rng, 4, 5, t + k);
      double lhs = Pairing(vx, vy, zp, u);
      double rhs = bregman(A, alpha + beta, z, u) - bregman(A, alpha, zp, u) -
                   bregman(A, alpha, z, zp);
      worst = std::min(worst, rhs - lhs);
    }
  }
  EXPECT_GE(worst, -1e-8);
}

TEST(XgradStepOracleTest, ZeroForcingIsFixedPoint) {
  Rng rng(3);
  SparseMatrix A = SparseMatrix::FromDense(uniform_matrix(rng, 3, 4));
  XgradStep s = xgrad_step_oracle(A, PrimalDualPoint::Center(3, 4), Vec::Zero(3),
                                  Vec::Zero(4), Vec::Zero(4), 4, 4);
  EXPECT_LE(s.z_plus.x.norm(), 1e-15);
  EXPECT_LE((s.z_plus.y() - Vec::Constant(4, 0.25)).norm(), 1e-15);
  EXPECT_LE((SoftmaxFromLog(s.logybar_plus) - Vec::Constant(4, 0.25)).norm(), 1e-15);
}

TEST(XgradStepOracleTest, ContractSampled) {
  Rng rng(4);
  double worst = 0;
  for (int t = 0; t < 4000; ++t) {
    BoxSimplexInstance inst = random_instance(rng, 4, 5);
    SparseMatrix A = inst.A.scaled(1.0 / inst.L);
    PrimalDualPoint z = random_point(rng, 4, 5);
    Vec ybar = interior_simplex(rng, 5);
    Vec logybar = ybar.array().log();
    double scale = t % 4 == 0 ? 5.0 : 0.5;
    Vec vx = scale * gaussian(rng, 4), vy = scale * gaussian(rng, 5);
    XgradStep s = xgrad_step_oracle(A, z, vx, vy, logybar, 4, 4);
    for (int k = 0; k < 3; ++k) {
      PrimalDualPoint u = RandomComparator(rng, 4, 5, t + k);
      double lhs = Pairing(vx, vy, s.z_plus, u);
      double rhs = bregman(A, 4, z, u) - bregman(A, 4, s.z_plus, u) -
                   bregman(A, 4, z, s.z_plus) +
                   entropy_bregman_log(4, logybar, u.logy) -
                   entropy_bregman_log(4, s.logybar_plus, u.logy);
      worst = std::min(worst, rhs - lhs);
    }
  }
  EXPECT_GE(worst, -1e-8);
}

// y+ and ybar+ are the minimizers of their two prox problems centered at ybar,
// differing only in the box point entering grad_y r. Checked by comparing the
// prox objective at the returned point against random simplex points.
TEST(XgradStepOracleTest, DualPointsSolveTheirProxProblems) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    BoxSimplexInstance inst = random_instance(rng, 3, 4);
    SparseMatrix A = inst.A.scaled(1.0 / inst.L);
    PrimalDualPoint z = random_point(rng, 3, 4);
    Vec ybar = interior_simplex(rng, 4);
    Vec vx = gaussian(rng, 3), vy = gaussian(rng, 4);
    const double alpha = 4, beta = 4;
    XgradStep s = xgrad_step_oracle(A, z, vx, vy, ybar.array().log(), alpha, beta);
    Vec y = z.y();
    auto grad_y = [&](const Vec& x, const Vec& yy) {
      return regularizer_gradient(A, alpha, x, yy).gy;
    };
    Vec wx = vx - regularizer_gradient(A, alpha, z.x, y).gx;
    Vec xbar = best_response_x(wx, A.abs_times(ybar));
    Vec g1 = vy + grad_y(xbar, ybar) - grad_y(z.x, y);
    Vec yplus = s.z_plus.y();
    Vec g2 = vy + grad_y(s.z_plus.x, yplus) - grad_y(z.x, y);
    Vec ybarplus = SoftmaxFromLog(s.logybar_plus);
    auto obj = [&](const Vec& g, const Vec& yy) {
      return g.dot(yy) + entropy_bregman(beta, ybar, yy);
    };
    EXPECT_LE((s.z_plus.x - best_response_x(wx, A.abs_times(yplus))).norm(), 1e-12);
    for (int k = 0; k < 50; ++k) {
      Vec probe = k % 2 ? dirichlet(rng, 4) : Vec((yplus + 1e-3 * gaussian(rng, 4)).cwiseMax(1e-9));
      probe /= probe.sum();
      EXPECT_LE(obj(g1, yplus), obj(g1, probe) + 1e-12);
      Vec probe2 = (ybarplus + 1e-3 * gaussian(rng, 4)).cwiseMax(1e-9);
      probe2 /= probe2.sum();
      EXPECT_LE(obj(g2, ybarplus), obj(g2, probe2) + 1e-12);
    }
  }
}

TEST(CombinedStepTest, TelescopingInequalityAlongRun) {
  Rng rng(6);
  BoxSimplexInstance inst = random_instance(rng, 6, 5);
  SparseMatrix A = inst.A.scaled(1.0 / inst.L);
  BoxSimplexInstance scaled =
      BoxSimplexInstance::Make(A, inst.b / inst.L, inst.c / inst.L);
  const double eta = 1.0 / 3.0;
  PrimalDualPoint z = PrimalDualPoint::Center(6, 5);
  Vec logybar = Vec::Zero(5);
  double worst = 0;
  for (int t = 0; t < 300; ++t) {
    Gradient g = gradient(scaled, z);
    PrimalDualPoint zp = grad_step_oracle(A, z, eta * g.gx, eta * g.gy, 2, 2);
    Gradient gp = gradient(scaled, zp);
    XgradStep s = xgrad_step_oracle(A, z, eta / 2 * gp.gx, eta / 2 * gp.gy, logybar, 4, 4);
    for (int k = 0; k < 10; ++k) {
      PrimalDualPoint u = RandomComparator(rng, 6, 5, t + k);
      double lhs = eta * Pairing(gp.gx, gp.gy, zp, u);
      double rhs = 2 * bregman(A, 4, z, u) - 2 * bregman(A, 4, s.z_plus, u) +
                   2 * entropy_bregman_log(4, logybar, u.logy) -
                   2 * entropy_bregman_log(4, s.logybar_plus, u.logy);
      worst = std::min(worst, rhs - lhs);
    }
    z = s.z_plus;
    logybar = s.logybar_plus;
    EXPECT_LE(z.x.lpNorm<Eigen::Infinity>(), 1.0);
    EXPECT_TRUE(z.logy.allFinite());
    EXPECT_GT(z.y().minCoeff(), 0.0);
  }
  EXPECT_GE(worst, -1e-8);
}

TEST(SolveTest, IterationBound) {
  EXPECT_EQ(iteration_bound(2, 1.0, 0.1), 393);
  EXPECT_EQ(iteration_bound(2, 1.0, 0.1),
            static_cast<long>(std::ceil(60 * (8 * std::log(2.0) + 1))));
}

TEST(SolveTest, IdentityInstance) {
  auto inst = BoxSimplexInstance::Make(SparseMatrix::Identity(2), Vec::Zero(2),
                                       Vec::Zero(2));
  SolverParams params;
  params.epsilon = 0.1;
  SolveResult res = solve(inst, params);
  EXPECT_LE(res.gap, 0.1);
  EXPECT_LE(std::abs(res.value - (-1.0)), 0.1);
  EXPECT_EQ(res.T, 393);
  EXPECT_NEAR(res.gap, duality_gap(inst, res.x, res.y), 1e-15);
}

TEST(SolveTest, ZeroMatrixDirectSolve) {
  auto inst = BoxSimplexInstance::Make(SparseMatrix(3, 2, {}), Vec{{0.5, -0.25}},
                                       Vec{{1.0, -2.0, 0.0}});
  SolverParams params;
  params.epsilon = 0.1;
  SolveResult res = solve(inst, params);
  EXPECT_EQ(res.x, (Vec{{-1.0, 1.0, 0.0}}));
  EXPECT_EQ(res.y, V2(0, 1));
  EXPECT_EQ(res.gap, 0.0);
  EXPECT_EQ(res.iterations, 0);
}

TEST(SolveTest, RejectsNonPositiveEpsilon) {
  auto inst = BoxSimplexInstance::Make(SparseMatrix::Identity(2), Vec::Zero(2),
                                       Vec::Zero(2));
  SolverParams params;
  params.epsilon = 0;
  EXPECT_THROW(solve(inst, params), std::invalid_argument);
}

TEST(SolveTest, RandomInstancesCertifyGap) {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    BoxSimplexInstance inst = random_instance(rng, 12, 9);
    SolverParams params;
    params.epsilon = 0.05 * inst.L;
    params.early_exit = trial % 2 == 0;
    SolveResult res = solve(inst, params);
    EXPECT_LE(res.gap, params.epsilon);
    EXPECT_NEAR(res.gap, duality_gap(inst, res.x, res.y), 1e-12);
    EXPECT_LE(res.products_per_iteration, 10.0);
    EXPECT_NEAR(res.y.sum(), 1.0, 1e-12);
    EXPECT_LE(res.x.lpNorm<Eigen::Infinity>(), 1.0);
    for (size_t k = 1; k < res.trace.size(); ++k) {
      EXPECT_GT(res.trace[k].iteration, res.trace[k - 1].iteration);
      EXPECT_GE(res.trace[k].gap, 0.0);
    }
    if (!params.early_exit) EXPECT_EQ(res.iterations, res.T);
  }
}

TEST(SolveTest, EmptyRowsAreFixedByTheirCost) {
  Mat dense = Mat::Zero(3, 3);
  dense(0, 0) = 1;
  dense(0, 2) = -1;
  dense(2, 1) = 0.5;
  auto inst = BoxSimplexInstance::Make(SparseMatrix::FromDense(dense),
                                       Vec{{0.1, 0.2, -0.3}}, Vec{{0.2, -0.7, 0.1}});
  SolverParams params;
  params.epsilon = 0.02;
  SolveResult res = solve(inst, params);
  EXPECT_EQ(res.x[1], 1.0);
  EXPECT_LE(res.gap, 0.02);
}

TEST(SolveTest, Deterministic) {
  Rng rng(8);
  BoxSimplexInstance inst = random_instance(rng, 10, 10);
  SolverParams params;
  params.epsilon = 0.1 * inst.L;
  SolveResult a = solve(inst, params), b = solve(inst, params);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].iteration, b.trace[k].iteration);
    EXPECT_EQ(a.trace[k].gap, b.trace[k].gap);
  }
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
}

}  // namespace
}  // namespace acsolve
