#ifndef LDYN_LYAPUNOV_HPP
#define LDYN_LYAPUNOV_HPP

// Finite-time and pointwise Lyapunov exponents, empirical measures and the
// attracting-cycle scan for negative exponents.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ldyn/big_float.hpp"
#include "ldyn/error.hpp"
#include "ldyn/interval_map.hpp"

namespace ldyn {

enum class Fidelity { fast, high };

inline std::string_view to_string(Fidelity f) { return f == Fidelity::fast ? "fast" : "high"; }

/// Uniform double in (0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  double u = 0.0;
  while (u == 0.0) u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return u;
}

/// SplitMix64 finaliser, used to derive per-task seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct LyapunovProfile {
  /// (n, Λ_n) with Λ_n = (1/n) log|Df^n(x)|.
  std::vector<std::pair<std::size_t, double>> checkpoints;
  std::size_t N = 0;
  std::size_t tail_begin = 0;
  std::size_t tail_stride = 1;
  double lambda_minus_est = 0.0;
  double lambda_plus_est = 0.0;

  [[nodiscard]] std::optional<double> at(std::size_t n) const {
    for (const auto& [k, v] : checkpoints)
      if (k == n) return v;
    return std::nullopt;
  }
};

/// Neumaier-compensated running sum, used by fast-mode profiles.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double v) {
    const double t = sum_ + v;
    comp_ += std::fabs(sum_) >= std::fabs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
    return *this;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {
/// Drives the profile bookkeeping from a per-step log-derivative source.
/// `Sum` is CompensatedSum (fast) or ExactSum (high fidelity).
template <class Sum>
LyapunovProfile assemble_profile(std::size_t N, std::vector<std::size_t> checkpoints,
                                 const std::function<double(std::size_t)>& term) {
  if (N < 1) throw Error(ErrorKind::invalid_argument, "profile needs N >= 1");
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  for (std::size_t c : checkpoints)
    if (c < 1 || c > N) throw Error(ErrorKind::invalid_argument, "checkpoints must lie in [1, N]");

  LyapunovProfile prof;
  prof.N = N;
  prof.tail_begin = std::max<std::size_t>(1, (N + 1) / 2);
  prof.tail_stride = N <= 100000 ? 1 : (N + 99) / 100;
  prof.lambda_minus_est = std::numeric_limits<double>::infinity();
  prof.lambda_plus_est = -std::numeric_limits<double>::infinity();

  Sum sum{};
  auto value = [&sum](std::size_t n) { return sum.value() / static_cast<double>(n); };
  std::size_t next_cp = 0;
  for (std::size_t n = 1; n <= N; ++n) {
    sum += term(n - 1);
    const bool in_tail = n >= prof.tail_begin && ((n - prof.tail_begin) % prof.tail_stride == 0 || n == N);
    const bool is_cp = next_cp < checkpoints.size() && checkpoints[next_cp] == n;
    if (!in_tail && !is_cp) continue;
    const double lam = value(n);
    if (in_tail) {
      prof.lambda_minus_est = std::min(prof.lambda_minus_est, lam);
      prof.lambda_plus_est = std::max(prof.lambda_plus_est, lam);
    }
    if (is_cp) {
      prof.checkpoints.emplace_back(n, lam);
      ++next_cp;
    }
  }
  return prof;
}
}  // namespace detail

/// Builds a profile from precomputed per-step log-derivative terms, summed exactly.
inline LyapunovProfile profile_from_terms(const std::vector<double>& terms, std::size_t N,
                                          std::vector<std::size_t> checkpoints) {
  if (N > terms.size()) throw Error(ErrorKind::invalid_argument, "not enough orbit terms for N");
  return detail::assemble_profile<ExactSum>(N, std::move(checkpoints), [&terms](std::size_t i) { return terms[i]; });
}

/// Finite-time exponent profile of x. Fast mode iterates in double; high mode
/// evaluates the orbit in extended precision (cost grows like N^2 log N).
inline LyapunovProfile profile(const IntervalMap& map, double x, std::size_t N, std::vector<std::size_t> checkpoints,
                               Fidelity fidelity = Fidelity::fast) {
  if (fidelity == Fidelity::high) return profile_from_terms(log_deriv_terms_high(map, x, N), N, std::move(checkpoints));
  double y = x;
  return detail::assemble_profile<CompensatedSum>(N, std::move(checkpoints), [&](std::size_t i) {
    const double t = log_abs_derivative(map, y, i);
    y = step(map, y, i + 1);
    return t;
  });
}

/// Point masses with positive weights summing to one.
struct EmpiricalMeasure {
  std::vector<double> points;
  std::vector<double> weights;
  std::string source;

  static EmpiricalMeasure dirac(double x) { return {{x}, {1.0}, "dirac"}; }

  static EmpiricalMeasure uniform(std::vector<double> pts, std::string source) {
    if (pts.empty()) throw Error(ErrorKind::invalid_argument, "empty measure");
    const double w = 1.0 / static_cast<double>(pts.size());
    std::vector<double> ws(pts.size(), w);
    return {std::move(pts), std::move(ws), std::move(source)};
  }

  /// Orbit segment f^b(x), ..., f^{b+n-1}(x) after `burn_in` discarded iterates.
  static EmpiricalMeasure orbit(const IntervalMap& map, double x, std::size_t n, std::size_t burn_in = 1000) {
    for (std::size_t i = 0; i < burn_in; ++i) x = step(map, x, i + 1);
    std::vector<double> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(x);
      x = step(map, x, burn_in + i + 1);
    }
    return uniform(std::move(pts), "orbit of " + map.name());
  }

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

struct MeasureExponent {
  double value = 0.0;
  /// False when an atom of weight > 1e-6 sits within δ_c of a critical point.
  bool reliable = true;
};

/// λ(μ) = Σ w_i log|Df(x_i)|.
inline MeasureExponent measure_exponent(const IntervalMap& map, const EmpiricalMeasure& mu) {
  MeasureExponent out;
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    const double x = mu.points[i];
    const double w = mu.weights[i];
    if (map.is_critical(x, kCriticalProximity) && w > 1e-6) out.reliable = false;
    const double d = map.derivative(x);
    if (d == 0.0) {
      out.reliable = false;
      sum = -std::numeric_limits<double>::infinity();
      continue;
    }
    sum += w * std::log(std::fabs(d));
  }
  out.value = sum;
  return out;
}

/// An attracting periodic orbit found by return-proximity and multiplier tests.
struct AttractingCycle {
  std::size_t period = 0;
  std::vector<double> points;
  double multiplier = 0.0;  // |Df^q| along the cycle
};

/// Smallest q <= max_period with |f^q(x) - x| < tol and |Df^q(x)| < 1.
inline std::optional<AttractingCycle> detect_attracting_cycle(const IntervalMap& map, double x,
                                                              std::size_t max_period = 64, double tol = 1e-6) {
  std::vector<double> pts{x};
  double logmult = 0.0;
  double y = x;
  for (std::size_t q = 1; q <= max_period; ++q) {
    const double d = map.derivative(y);
    logmult += d == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(d));
    y = step(map, y);
    if (std::fabs(y - x) < tol && logmult < 0.0) {
      return AttractingCycle{q, pts, std::exp(logmult)};
    }
    pts.push_back(y);
  }
  return std::nullopt;
}

inline EmpiricalMeasure cycle_measure(const AttractingCycle& cyc) {
  return EmpiricalMeasure::uniform(cyc.points, "attracting cycle of period " + std::to_string(cyc.period));
}

struct ScanOptions {
  std::size_t N = 10000;
  std::size_t burn_in = 1000;
  double negative_threshold = -0.05;
  std::size_t max_period = 64;
  double cycle_tol = 1e-6;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

struct ScanEntry {
  double param = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double x0 = 0.0;
  double lambda = 0.0;
  std::size_t period = 0;  // 0 when no attracting cycle was detected
  double multiplier = 0.0;
  bool violation = false;
  std::string error;
};

/// For each (param, trial) pair: estimate Λ_N from a random start after
/// burn-in; whenever Λ_N < threshold require an attracting cycle. Entries
/// with a negative exponent but no cycle are flagged as violations.
inline std::vector<ScanEntry> attractor_scan(Family family, const std::vector<double>& params, std::size_t trials,
                                             const ScanOptions& opt = {}) {
  std::vector<ScanEntry> entries;
  for (std::size_t p = 0; p < params.size(); ++p)
    for (std::size_t t = 0; t < trials; ++t) {
      ScanEntry e;
      e.param = params[p];
      e.trial = t;
      e.seed = mix_seed(opt.seed ^ mix_seed((std::uint64_t{p} << 20) + t));
      entries.push_back(e);
    }

  auto run_one = [&](ScanEntry& e) {
    try {
      const IntervalMap map(family, e.param);
      std::mt19937_64 rng(e.seed);
      e.x0 = unit_uniform(rng);
      double x = e.x0;
      for (std::size_t i = 0; i < opt.burn_in; ++i) x = step(map, x);
      const LyapunovProfile prof = profile(map, x, opt.N, {opt.N});
      e.lambda = prof.checkpoints.front().second;
      for (std::size_t i = 0; i < opt.N; ++i) x = step(map, x);
      if (e.lambda < opt.negative_threshold) {
        if (auto cyc = detect_attracting_cycle(map, x, opt.max_period, opt.cycle_tol)) {
          e.period = cyc->period;
          e.multiplier = cyc->multiplier;
        } else {
          e.violation = true;
        }
      }
    } catch (const Error& err) {
      // An exact critical hit: the orbit reached c, so look for a superattracting cycle through it.
      e.error = err.what();
      e.lambda = -std::numeric_limits<double>::infinity();
      const IntervalMap map(family, e.param);
      if (auto cyc = detect_attracting_cycle(map, map.critical_point(), opt.max_period, opt.cycle_tol)) {
        e.period = cyc->period;
        e.multiplier = cyc->multiplier;
      } else {
        e.violation = true;
      }
    }
  };

  std::size_t nthreads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min(nthreads, std::max<std::size_t>(1, entries.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < nthreads; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < entries.size(); i += nthreads) run_one(entries[i]);
    });
  for (auto& th : pool) th.join();
  return entries;
}

}  // namespace ldyn

#endif  // LDYN_LYAPUNOV_HPP
