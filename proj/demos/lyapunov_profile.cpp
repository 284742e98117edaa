// Finite-time exponents of a typical logistic(4) orbit and of the tent map.
#include <cmath>
#include <cstdio>
#include <random>

#include "ldyn/ldyn.hpp"

int main() {
  using namespace ldyn;
  std::mt19937_64 rng(7);
  const IntervalMap logistic(Family::logistic, 4.0);
  const LyapunovProfile p = profile(logistic, unit_uniform(rng), 1000000, {10, 100, 1000, 10000, 100000, 1000000});
  std::printf("logistic:4   log 2 = %.6f\n", std::log(2.0));
  for (const auto& [n, v] : p.checkpoints) std::printf("  n = %7zu  lambda_n = %.6f\n", n, v);

  for (double s : {1.3, 1.7, 2.0}) {
    const IntervalMap tent(Family::tent, s);
    const LyapunovProfile t = profile(tent, 0.1234, 1000, {1000});
    std::printf("tent:%.1f  lambda_1000 - log s = %.3g\n", s, t.checkpoints.front().second - std::log(s));
  }
}
