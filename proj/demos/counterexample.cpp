// A point whose lower exponent is negative for logistic(4) while its image
// under the conjugacy to the sine map has positive lower exponent.
#include <cstdio>

#include "ldyn/ldyn.hpp"

int main() {
  using namespace ldyn;
  const CounterexampleReport r = counterexample_experiment(200, 2);
  std::printf("schedule length %zu, precision %ld / %ld bits\n", r.length, static_cast<long>(r.precision_f),
              static_cast<long>(r.precision_g));
  for (const StageReport& s : r.stages)
    std::printf("n_k = %5zu  f: dip %+.4f  recovery %+.4f | g: dip %+.4f  recovery %+.4f | log2|c-y| / n = %.3f\n",
                s.n, s.lambda_f_dip, s.lambda_f_recovery, s.lambda_g_dip, s.lambda_g_recovery, s.fitted_exponent);
  std::printf("signs (%c, %c), alpha = %.4f, predicted sine rate %.4f\n", r.sign_f < 0 ? '-' : '+',
              r.sign_g < 0 ? '-' : '+', r.alpha, r.predicted_g_rate);
}
