// Finds the smallest degree constant for which the exp(-t) interpolant meets
// half the requested accuracy on [0, R] over a grid of (R, eps).
#include <cmath>
#include <cstdio>

#include "acsolve/meq.h"

int main() {
  using acsolve::ExpPolynomial;
  double worst = 0.0;
  for (double R : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0}) {
    for (double eps : {0.5, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
      int deg = 1;
      for (;; ++deg) {
        ExpPolynomial p = ExpPolynomial::with_degree(R, deg);
        double err = 0.0;
        for (int k = 0; k <= 4000; ++k) {
          double t = R * k / 4000.0;
          err = std::max(err, std::abs(p(t) - std::exp(-t)));
        }
        if (err <= 0.5 * eps) break;
      }
      double l = std::log(1.0 / eps);
      double c = deg / (std::sqrt(R * l) + l);
      worst = std::max(worst, c);
      std::printf("R=%-6g eps=%-6g degree=%-4d c=%.3f\n", R, eps, deg, c);
    }
  }
  std::printf("max c = %.3f\n", worst);
}
