#include "acsolve/meq.h"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

namespace acsolve {
namespace {

Mat RandomPsd(Rng& rng, int d, int rank) {
  Mat G(d, rank);
  for (int j = 0; j < rank; ++j) G.col(j) = gaussian(rng, d);
  return G * G.transpose() / rank;
}

// Symmetric matrix with operator norm exactly r.
Mat SymmetricWithNorm(Rng& rng, int d, double r) {
  Mat S = random_symmetric(rng, d);
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return S * (r / es.eigenvalues().cwiseAbs().maxCoeff());
}

// Dense reference: V_i = <A_i, exp(M)> / Tr exp(M) by explicit exponential.
Vec DenseMeq(const std::vector<Mat>& mats, const Mat& M) {
  Mat E = exp_symmetric(M);
  Vec out(mats.size());
  for (size_t i = 0; i < mats.size(); ++i) {
    out[i] = mats[i].cwiseProduct(E).sum() / E.trace();
  }
  return out;
}

bool MeqBoundHolds(const std::vector<Mat>& mats, const Mat& M, const Vec& V,
                   double eps, double gamma) {
  Mat Y = exp_normalized(M);
  for (size_t i = 0; i < mats.size(); ++i) {
    Mat absA = spectral_abs(mats[i]);
    double truth = mats[i].cwiseProduct(Y).sum();
    double allowed = eps * absA.cwiseProduct(Y).sum() + gamma * absA.trace();
    if (std::abs(V[i] - truth) > allowed) return false;
  }
  return true;
}

TEST(MeqExactTest, Examples) {
  EXPECT_DOUBLE_EQ(meq_exact({Mat::Constant(1, 1, 2.0)}, Mat::Zero(1, 1))[0], 2.0);
  Mat M = Vec{{0.0, std::log(3.0)}}.asDiagonal();
  Mat A = Vec{{1.0, -1.0}}.asDiagonal();
  EXPECT_NEAR(meq_exact({A}, M)[0], -0.5, 1e-15);
  Rng rng(1);
  Mat S = random_symmetric(rng, 6);
  std::vector<Mat> mats = {random_symmetric(rng, 6), RandomPsd(rng, 6, 2)};
  Vec a = meq_exact(mats, S);
  Vec b = meq_exact(mats, S + 7.0 * Mat::Identity(6, 6));
  EXPECT_LE((a - b).lpNorm<Eigen::Infinity>(), 1e-13);
  EXPECT_LE((a - DenseMeq(mats, S)).lpNorm<Eigen::Infinity>(), 1e-13);
}

TEST(MeqExactTest, NormalizedExponentialIsDensity) {
  Rng rng(2);
  Mat Y = exp_normalized(50.0 * random_symmetric(rng, 8));
  EXPECT_NEAR(Y.trace(), 1.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(Y, Eigen::EigenvaluesOnly);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-15);
  EXPECT_TRUE(Y.allFinite());
}

TEST(SpectralTest, AbsAndLogTrace) {
  Mat A{{0.0, 1.0}, {1.0, 0.0}};
  EXPECT_LE((spectral_abs(A) - Mat::Identity(2, 2)).norm(), 1e-15);
  Mat D = Vec{{1.0, 2.0, 3.0}}.asDiagonal();
  EXPECT_NEAR(log_trace_exp(D), std::log(std::exp(1) + std::exp(2) + std::exp(3)), 1e-14);
  EXPECT_NEAR(lambda_max(D), 3.0, 1e-14);
}

TEST(TopEigenvalueTest, KnownSpectra) {
  Mat D = Vec{{1.0, 2.0, 3.0}}.asDiagonal();
  EigenEstimate est = top_eigenvalue(D, 0.1, 0.1, 1);
  EXPECT_GE(est.value, 2.7);
  EXPECT_LE(est.value, 3.0 + 1e-12);
  EigenEstimate pw = top_eigenvalue_power(D, 0.1, 0.1, 1);
  EXPECT_GE(pw.value, 2.7);
  EXPECT_LE(pw.value, 3.0 + 1e-12);

  Rng rng(3);
  Vec v = gaussian(rng, 40);
  EigenEstimate r1 = top_eigenvalue(v * v.transpose(), 0.05, 0.1, 2);
  EXPECT_NEAR(r1.value, v.squaredNorm(), 0.05 * v.squaredNorm());
  EXPECT_TRUE(r1.converged);
}

TEST(TopEigenvalueTest, RandomPsdAgainstDense) {
  Rng rng(4);
  int hits = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Mat M = RandomPsd(rng, 100, 100);
    double truth = lambda_max(M);
    EigenEstimate est = top_eigenvalue(M, 0.1, 0.05, seed);
    if (est.value <= truth * (1 + 1e-12) && est.value >= (1 - 0.1) * truth) ++hits;
  }
  EXPECT_GE(hits, 95);
}

TEST(TopEigenvalueTest, RejectsBadParameters) {
  EXPECT_THROW(top_eigenvalue(Mat::Identity(2, 2), 0.0, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(top_eigenvalue(Mat::Identity(2, 2), 0.1, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(top_eigenvalue(Mat(2, 3), 0.1, 0.1, 1), std::invalid_argument);
}

TEST(ExpPolynomialTest, ScalarAccuracy) {
  for (double R : {1.0, 10.0, 40.0}) {
    for (double eps : {1e-2, 1e-6, 1e-10}) {
      ExpPolynomial p(R, eps);
      EXPECT_LE(std::abs(p(0.0) - 1.0), eps);
      for (int k = 0; k < 200; ++k) {
        double t = R * k / 199.0;
        EXPECT_LE(std::abs(p(t) - std::exp(-t)), eps) << "R=" << R << " t=" << t;
      }
    }
  }
}

TEST(ExpPolynomialTest, DegreeFormula) {
  const double l = std::log(1e4);
  EXPECT_EQ(ExpPolynomial::degree_for(10.0, 1e-4, 1.0),
            static_cast<int>(std::ceil(std::sqrt(10.0 * l) + l)));
  EXPECT_EQ(ExpPolynomial(10.0, 1e-4).degree(), ExpPolynomial::degree_for(10.0, 1e-4));
}

TEST(ExpPolynomialTest, OperatorNormAgainstDenseExponential) {
  Rng rng(5);
  Mat S = SymmetricWithNorm(rng, 50, 5.0);
  Mat Mt = S + 5.0 * Mat::Identity(50, 50);  // spectrum in [0, 10]
  const double eps = 1e-6;
  ExpPolynomial p(10.0, eps);
  Mat err = p.matrix(Mt) - exp_symmetric(-Mt);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (err + err.transpose()),
                                        Eigen::EigenvaluesOnly);
  EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), eps);
  Vec v = gaussian(rng, 50);
  EXPECT_LE((poly_exp_apply(Mt, 10.0, eps, v) - exp_symmetric(-Mt) * v).norm(),
            eps * v.norm());
  Mat V(50, 3);
  for (int j = 0; j < 3; ++j) V.col(j) = gaussian(rng, 50);
  EXPECT_LE((p.apply(Mt, V) - p.matrix(Mt) * V).norm(), 1e-10 * V.norm());
}

TEST(SketchTest, RowNormsAndIsometry) {
  Rng rng(6);
  const int d = 50;
  const double eps = 0.2, delta = 0.1;
  const int k = sketch_rows(d, eps, delta);
  EXPECT_EQ(k, static_cast<int>(std::ceil(24.0 / (eps * eps) * std::log(d / delta))));
  Vec v = gaussian(rng, d);
  int good = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    Mat Q = jl_sketch(k, d, rng);
    for (int l = 0; l < k; ++l) {
      ASSERT_NEAR(Q.row(l).norm(), std::sqrt(static_cast<double>(d) / k), 1e-13);
    }
    double ratio = (Q * v).squaredNorm() / v.squaredNorm();
    if (ratio >= 1 - eps && ratio <= 1 + eps) ++good;
  }
  EXPECT_GE(good, static_cast<int>((1 - delta) * seeds));
}

TEST(ShiftPlanTest, ShiftDominatesAndLeavesSmallEigenvalue) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const double R = 10.0;
    Mat M = SymmetricWithNorm(rng, 30, R);
    ShiftPlan plan = shift_plan(M, R, 0.1, t);
    Eigen::SelfAdjointEigenSolver<Mat> es(plan.Mtilde, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
    EXPECT_LE(es.eigenvalues().minCoeff(), 1.0 + 1e-12);
    EXPECT_LE(es.eigenvalues().maxCoeff(), plan.bound + 1e-12);
  }
}

TEST(TraceExpTest, ZeroMatrix) {
  TraceEstimate est = approx_trace_exp(Mat::Zero(50, 50), 0.2, 0.1, 1.0, 1);
  EXPECT_NEAR(est.value, 50.0, 0.2 * 50.0);
  EXPECT_NEAR(est.log_value, std::log(est.value), 1e-12);
}

TEST(TraceExpTest, KnownDiagonal) {
  Rng rng(8);
  const int d = 200;
  int hits = 0;
  for (int s = 0; s < 10; ++s) {
    Vec lam = uniform_box(rng, d, -10.0, 10.0);
    Mat M = lam.asDiagonal();
    double truth = lam.array().exp().sum();
    TraceEstimate est = approx_trace_exp(M, 0.2, 0.1, 10.0, s);
    if (std::abs(est.value - truth) <= 0.2 * truth) ++hits;
  }
  EXPECT_GE(hits, 9);
}

TEST(TraceExpTest, ShiftRobustness) {
  Rng rng(9);
  Mat M = SymmetricWithNorm(rng, 40, 3.0);
  TraceEstimate a = approx_trace_exp(M, 0.2, 0.1, 10.0, 3);
  TraceEstimate b = approx_trace_exp(M - 7.0 * Mat::Identity(40, 40), 0.2, 0.1, 10.0, 3);
  EXPECT_NEAR(a.value * std::exp(-7.0) / b.value, 1.0, 0.4);
}

TEST(MeqSketchedTest, ZeroMatricesGiveZero) {
  Rng rng(10);
  Mat M = SymmetricWithNorm(rng, 10, 1.0);
  MeqParams params;
  Vec V = meq_sketched({Mat::Zero(10, 10), Mat::Zero(10, 10)}, M, params);
  EXPECT_EQ(V, Vec::Zero(2));
}

TEST(MeqSketchedTest, ExactHooksReproduceExact) {
  Rng rng(11);
  Mat M = SymmetricWithNorm(rng, 12, 4.0);
  std::vector<Mat> mats;
  for (int i = 0; i < 4; ++i) mats.push_back(random_symmetric(rng, 12));
  MeqParams params;
  params.R = 4.0;
  params.identity_sketch = true;
  params.exact_exponential = true;
  EXPECT_LE((meq_sketched(mats, M, params) - meq_exact(mats, M)).lpNorm<Eigen::Infinity>(),
            1e-8);
  params.exact_exponential = false;
  params.eps_mul = 1e-9;
  params.gamma_add = 1e-9;
  EXPECT_LE((meq_sketched(mats, M, params) - meq_exact(mats, M)).lpNorm<Eigen::Infinity>(),
            1e-8);
}

TEST(MeqSketchedTest, DiagonalHighAccuracy) {
  Rng rng(12);
  const int d = 20;
  Mat M = Vec(uniform_box(rng, d, -2.0, 2.0)).asDiagonal();
  std::vector<Mat> mats;
  for (int i = 0; i < 3; ++i) mats.push_back(Vec(uniform_box(rng, d)).asDiagonal());
  MeqParams params;
  params.eps_mul = 0.01;
  params.gamma_add = 1e-3;
  params.R = 2.0;
  params.seed = 5;
  EXPECT_TRUE(MeqBoundHolds(mats, M, meq_sketched(mats, M, params), 0.01, 1e-3));
}

TEST(MeqSketchedTest, RankOneBoundOverSeeds) {
  Rng rng(13);
  const int d = 50;
  std::vector<Mat> mats;
  for (int i = 0; i < 5; ++i) {
    Vec v = gaussian(rng, d).normalized();
    mats.push_back((i % 2 ? -1.0 : 1.0) * v * v.transpose());
  }
  int hits = 0;
  for (int s = 0; s < 20; ++s) {
    Mat M = SymmetricWithNorm(rng, d, 10.0);
    MeqParams params;
    params.eps_mul = 0.2;
    params.gamma_add = 1e-3;
    params.delta = 0.1;
    params.R = 10.0;
    params.seed = s;
    if (MeqBoundHolds(mats, M, meq_sketched(mats, M, params), 0.2, 1e-3)) ++hits;
  }
  EXPECT_GE(hits, 18);
}

}  // namespace
}  // namespace acsolve
