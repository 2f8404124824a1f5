#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace acsolve {

// Outcome of one sampled property suite. worst is the largest observed
// lhs - rhs over all samples (or error - allowance for the MEQ suite), so a
// nonpositive value means every sample held with room to spare.
struct SuiteReport {
  std::string name;
  long samples = 0;
  long violations = 0;
  long allowed_violations = 0;  // nonzero only for probabilistic suites
  double worst = -1e300;
  double tolerance = 0.0;
  bool passed() const { return violations <= allowed_violations; }
};

// Known suites, in the order `check` runs them:
//   joint-convexity     Bregman divergence of r at alpha in {1/2, 1, 2, 4}
//   area-convexity      three-point area convexity at eta = 1/3, alpha = 2
//                       on random 10 x 10 instances
//   grad-oracle         gradient step contract
//   xgrad-oracle        extragradient step contract
//   divergence-bounds   V_{z0}(u) <= 1 + alpha ln d and KL(u || uniform) <= ln d
//   area-implication    r(z) + r(z') + r(z+) - 3 r(c) =
//                       V_z(z+) + V_z(z') - 3 V_z(c) <= V_z(z+) + V_z(z')
//   rrl-implication     relative or area form implies the relaxed form
//   rrl-regret          relaxed mirror prox regret on 2 x 2 matrix games
//   meq-bound           sketched MEQ accuracy at delta = 0.1, one seed per sample
//   entropy-domination  von Neumann versus vector entropy Hessians at d = 4
const std::vector<std::string>& suite_names();

// Default sample count for a suite: 10^4, except 100 for meq-bound and
// entropy-domination.
long default_samples(const std::string& name);

// Throws std::invalid_argument for an unknown name or samples <= 0.
SuiteReport run_suite(const std::string& name, long samples, std::uint64_t seed);

}  // namespace acsolve
