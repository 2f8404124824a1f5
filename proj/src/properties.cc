#include "acsolve/properties.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "acsolve/boxsimplex.h"
#include "acsolve/meq.h"
#include "acsolve/sampling.h"
#include "acsolve/spectraplex.h"
#include "acsolve/xgrad.h"

namespace acsolve {
namespace {

constexpr double kSlack = 1e-8;

// Step sizes for perturbed samples; small steps stress cancellation.
constexpr double kPerturbSizes[] = {0.3, 1e-2, 1e-4};

BoxSimplexInstance NormalizedInstance(Rng& rng, int n, int d) {
  BoxSimplexInstance inst = random_instance(rng, n, d);
  return BoxSimplexInstance::Make(inst.A.scaled(1.0 / inst.L), inst.b / inst.L,
                                  inst.c / inst.L);
}

int RandomDim(Rng& rng) { return std::uniform_int_distribution<int>(1, 10)(rng); }

// Independent draw on even samples, a perturbation of base otherwise.
PrimalDualPoint Nearby(Rng& rng, const PrimalDualPoint& base, long s) {
  if (s % 2 == 0) return random_point(rng, static_cast<int>(base.x.size()),
                                      static_cast<int>(base.logy.size()));
  return perturb(rng, base, kPerturbSizes[(s / 2) % 3]);
}

// Box vertices or interior points, simplex vertices or Dirichlet draws.
PrimalDualPoint Comparator(Rng& rng, int n, int d, long k) {
  Vec ux = k % 2 ? uniform_box(rng, n) : Vec(uniform_box(rng, n).array().sign());
  Vec uy = k % 3 == 0 ? Vec(Vec::Unit(d, k % d)) : dirichlet(rng, d, 0.5);
  return PrimalDualPoint::FromSimplex(ux, uy);
}

double Pairing(const Vec& vx, const Vec& vy, const PrimalDualPoint& a,
               const PrimalDualPoint& b) {
  return vx.dot(a.x - b.x) + vy.dot(a.y() - b.y());
}

PrimalDualPoint Centroid(const PrimalDualPoint& a, const PrimalDualPoint& b,
                         const PrimalDualPoint& c) {
  return PrimalDualPoint::FromSimplex((a.x + b.x + c.x) / 3.0,
                                      (a.y() + b.y() + c.y()) / 3.0);
}

void Record(SuiteReport& rep, double excess) {
  rep.worst = std::max(rep.worst, excess);
  if (excess > rep.tolerance) ++rep.violations;
}

void JointConvexity(SuiteReport& rep, Rng& rng) {
  static constexpr double kAlphas[] = {0.5, 1.0, 2.0, 4.0};
  for (long s = 0; s < rep.samples; ++s) {
    int n = RandomDim(rng), d = RandomDim(rng);
    BoxSimplexInstance inst = NormalizedInstance(rng, n, d);
    PrimalDualPoint z = random_point(rng, n, d);
    PrimalDualPoint zp = Nearby(rng, z, s);
    Record(rep, -bregman(inst.A, kAlphas[s % 4], z, zp));
  }
}

void AreaConvexity(SuiteReport& rep, Rng& rng) {
  const double eta = 1.0 / 3.0, alpha = 2.0;
  for (long s = 0; s < rep.samples; ++s) {
    BoxSimplexInstance inst = NormalizedInstance(rng, 10, 10);
    PrimalDualPoint z = random_point(rng, 10, 10);
    PrimalDualPoint zp = Nearby(rng, z, s), zplus = Nearby(rng, z, s);
    Gradient g = gradient(inst, z), gp = gradient(inst, zp);
    double lhs = eta * ((gp.gx - g.gx).dot(zp.x - zplus.x) +
                        (gp.gy - g.gy).dot(zp.y() - zplus.y()));
    double rhs = regularizer(inst.A, alpha, z) + regularizer(inst.A, alpha, zp) +
                 regularizer(inst.A, alpha, zplus) -
                 3.0 * regularizer(inst.A, alpha, Centroid(z, zp, zplus));
    Record(rep, lhs - rhs);
  }
}

void GradOracle(SuiteReport& rep, Rng& rng) {
  for (long s = 0; s < rep.samples; ++s) {
    int n = RandomDim(rng), d = RandomDim(rng);
    SparseMatrix A = NormalizedInstance(rng, n, d).A;
    PrimalDualPoint z = random_point(rng, n, d);
    double scale = s % 4 == 0 ? 5.0 : 0.5;
    Vec vx = scale * gaussian(rng, n), vy = scale * gaussian(rng, d);
    double alpha = s % 2 ? 2.0 : 0.5, beta = s % 2 ? 2.0 : 1.0;
    PrimalDualPoint zp = grad_step_oracle(A, z, vx, vy, alpha, beta);
    PrimalDualPoint u = Comparator(rng, n, d, s);
    double lhs = Pairing(vx, vy, zp, u);
    double rhs = bregman(A, alpha + beta, z, u) - bregman(A, alpha, zp, u) -
                 bregman(A, alpha, z, zp);
    Record(rep, lhs - rhs);
  }
}

void XgradOracle(SuiteReport& rep, Rng& rng) {
  for (long s = 0; s < rep.samples; ++s) {
    int n = RandomDim(rng), d = RandomDim(rng);
    SparseMatrix A = NormalizedInstance(rng, n, d).A;
    PrimalDualPoint z = random_point(rng, n, d);
    Vec logybar = interior_simplex(rng, d).array().log();
    double scale = s % 4 == 0 ? 5.0 : 0.5;
    Vec vx = scale * gaussian(rng, n), vy = scale * gaussian(rng, d);
    const double alpha = 4.0, beta = 4.0;
    XgradStep st = xgrad_step_oracle(A, z, vx, vy, logybar, alpha, beta);
    PrimalDualPoint u = Comparator(rng, n, d, s);
    double lhs = Pairing(vx, vy, st.z_plus, u);
    double rhs = bregman(A, alpha, z, u) - bregman(A, alpha, st.z_plus, u) -
                 bregman(A, alpha, z, st.z_plus) +
                 entropy_bregman_log(beta, logybar, u.logy) -
                 entropy_bregman_log(beta, st.logybar_plus, u.logy);
    Record(rep, lhs - rhs);
  }
}

void DivergenceBounds(SuiteReport& rep, Rng& rng) {
  for (long s = 0; s < rep.samples; ++s) {
    int n = RandomDim(rng), d = RandomDim(rng);
    SparseMatrix A = NormalizedInstance(rng, n, d).A;
    PrimalDualPoint u = Comparator(rng, n, d, s);
    PrimalDualPoint z0 = PrimalDualPoint::Center(n, d);
    const double alpha = s % 2 ? 2.0 : 4.0, gamma = 4.0;
    const double logd = std::log(static_cast<double>(d));
    double excess = bregman(A, alpha, z0, u) - (1.0 + alpha * logd);
    excess = std::max(excess, entropy_bregman_log(gamma, z0.logy, u.logy) -
                                  gamma * logd);
    // z0 minimizes r, so no point has a smaller value.
    excess = std::max(excess,
                      regularizer(A, alpha, z0) - regularizer(A, alpha, u));
    Record(rep, excess);
  }
}

void AreaImplication(SuiteReport& rep, Rng& rng) {
  const double alpha = 2.0;
  for (long s = 0; s < rep.samples; ++s) {
    int n = RandomDim(rng), d = RandomDim(rng);
    SparseMatrix A = NormalizedInstance(rng, n, d).A;
    PrimalDualPoint z = random_point(rng, n, d);
    PrimalDualPoint zp = Nearby(rng, z, s), zplus = Nearby(rng, z, s);
    PrimalDualPoint c = Centroid(z, zp, zplus);
    double area = regularizer(A, alpha, z) + regularizer(A, alpha, zp) +
                  regularizer(A, alpha, zplus) - 3.0 * regularizer(A, alpha, c);
    double vplus = bregman(A, alpha, z, zplus), vprime = bregman(A, alpha, z, zp),
           vc = bregman(A, alpha, z, c);
    double identity = std::abs(area - (vplus + vprime - 3.0 * vc)) /
                      std::max(1.0, std::abs(area));
    Record(rep, std::max(identity, area - (vplus + vprime)));
  }
}

void RrlImplication(SuiteReport& rep, Rng& rng) {
  constexpr long kBatch = 100;
  for (long done = 0; done < rep.samples; done += kBatch) {
    int batch = static_cast<int>(std::min(kBatch, rep.samples - done));
    BoxSimplexInstance inst = NormalizedInstance(rng, 10, 10);
    BoxSimplexRegularizer r(inst.A, 2.0);
    RrlReport rr = check_rrl(box_simplex_operator(inst), r, 1.0 / 3.0, batch, rng);
    rep.violations += rr.rl_implication_failures + rr.area_implication_failures;
    rep.worst = std::max(rep.worst, rr.max_violation_rrl);
  }
}

void RrlRegret(SuiteReport& rep, Rng& rng) {
  const double eta = 0.5;
  const int T = 20;
  SeparableRegularizer r;
  r.add_entropy(2, 1.0).add_entropy(2, 1.0);
  for (long s = 0; s < rep.samples; ++s) {
    Mat M = uniform_matrix(rng, 2, 2);
    std::vector<Vec> comparators;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        Vec u(4);
        u << Vec::Unit(2, i), Vec::Unit(2, j);
        comparators.push_back(u);
      }
    }
    comparators.push_back(r.sample(rng));
    MirrorProxResult res =
        relaxed_mirror_prox(bilinear_game_operator(M), r, r.sample(rng), eta, T,
                            comparators);
    double excess = res.max_step_violation;
    for (size_t k = 0; k < comparators.size(); ++k) {
      excess = std::max(excess, res.regret[k] - res.bound[k]);
    }
    Record(rep, excess);
  }
}

void MeqBound(SuiteReport& rep, Rng& rng) {
  const int d = 50;
  const double eps = 0.2, gamma = 1e-3, R = 10.0;
  std::vector<Mat> mats, abs_mats;
  for (int i = 0; i < 5; ++i) {
    Vec v = gaussian(rng, d).normalized();
    mats.push_back((i % 2 ? -1.0 : 1.0) * v * v.transpose());
    abs_mats.push_back(spectral_abs(mats.back()));
  }
  rep.allowed_violations = static_cast<long>(std::floor(0.1 * rep.samples));
  for (long s = 0; s < rep.samples; ++s) {
    Mat M = random_symmetric(rng, d);
    M *= R / std::max(lambda_max(M), lambda_max(-M));
    MeqParams params;
    params.eps_mul = eps;
    params.gamma_add = gamma;
    params.delta = 0.1;
    params.R = R;
    params.seed = static_cast<std::uint64_t>(s);
    Vec est = meq_sketched(mats, M, params);
    Vec truth = meq_exact(mats, M);
    Mat Y = exp_normalized(M);
    double excess = -1e300;
    for (size_t i = 0; i < mats.size(); ++i) {
      double allowed = eps * abs_mats[i].cwiseProduct(Y).sum() +
                       gamma * abs_mats[i].trace();
      excess = std::max(excess, std::abs(est[i] - truth[i]) - allowed);
    }
    rep.worst = std::max(rep.worst, excess);
    if (excess > 0.0) ++rep.violations;
  }
}

void EntropyDomination(SuiteReport& rep, Rng& rng) {
  for (long s = 0; s < rep.samples; ++s) {
    std::vector<Mat> P = random_psd_partition(rng, 4, 4, 1 + s % 2);
    DominationCheck c =
        check_entropy_domination(P, random_density(rng, 4), random_symmetric(rng, 4));
    rep.worst = std::max(rep.worst, c.excess);
    if (c.violated) ++rep.violations;
  }
}

struct Suite {
  const char* name;
  void (*run)(SuiteReport&, Rng&);
  long samples;
  double tolerance;
};

const Suite kSuites[] = {
    {"joint-convexity", JointConvexity, 10000, kSlack},
    {"area-convexity", AreaConvexity, 10000, kSlack},
    {"grad-oracle", GradOracle, 10000, kSlack},
    {"xgrad-oracle", XgradOracle, 10000, kSlack},
    {"divergence-bounds", DivergenceBounds, 10000, kSlack},
    {"area-implication", AreaImplication, 10000, kSlack},
    {"rrl-implication", RrlImplication, 10000, 0.0},
    {"rrl-regret", RrlRegret, 10000, kSlack},
    {"meq-bound", MeqBound, 100, 0.0},
    {"entropy-domination", EntropyDomination, 100, 1e-4},
};

const Suite& Find(const std::string& name) {
  for (const Suite& s : kSuites) {
    if (name == s.name) return s;
  }
  throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Suite& s : kSuites) out.emplace_back(s.name);
    return out;
  }();
  return names;
}

long default_samples(const std::string& name) { return Find(name).samples; }

SuiteReport run_suite(const std::string& name, long samples, std::uint64_t seed) {
  const Suite& suite = Find(name);
  if (samples <= 0) throw std::invalid_argument("samples must be positive");
  SuiteReport rep;
  rep.name = name;
  rep.samples = samples;
  rep.tolerance = suite.tolerance;
  // Each suite draws from its own stream so selecting suites by name does not
  // change their samples.
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(&suite - kSuites)};
  Rng rng(seq);
  suite.run(rep, rng);
  return rep;
}

}  // namespace acsolve
