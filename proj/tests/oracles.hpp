#ifndef LDYN_TESTS_ORACLES_HPP
#define LDYN_TESTS_ORACLES_HPP

// Independent reference computations for the test suite. Nothing here calls
// the library's pullback, tower or kneading code.

#include <boost/rational.hpp>

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "ldyn/interval_map.hpp"

namespace oracle {

/// Plain forward iteration with the closed-form map, no clamping.
inline double iterate(const ldyn::IntervalMap& m, double x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x = m(x);
  return x;
}

/// Root of a sign-changing function by bisection to the last bit.
inline double bisect(const std::function<double(double)>& fn, double lo, double hi) {
  double flo = fn(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = fn(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// z_k of tent(2): 1/2 - 2^{-(k+2)}, exactly representable.
inline double tent2_z(std::size_t k) { return 0.5 - std::ldexp(1.0, -static_cast<int>(k) - 2); }

/// Fixed point of sin(pi x) in (1/2, 1).
inline double sine_fixed_point() {
  return bisect([](double x) { return std::sin(std::numbers::pi * x) - x; }, 0.6, 0.9);
}

/// a + b√2 with rational a, b; exact arithmetic for tent(√2).
struct QSqrt2 {
  using Q = boost::rational<long long>;
  Q a{0};
  Q b{0};

  friend QSqrt2 operator+(const QSqrt2& x, const QSqrt2& y) { return {x.a + y.a, x.b + y.b}; }
  friend QSqrt2 operator-(const QSqrt2& x, const QSqrt2& y) { return {x.a - y.a, x.b - y.b}; }
  friend QSqrt2 operator*(const QSqrt2& x, const QSqrt2& y) {
    return {x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  /// Exact sign of a + b√2.
  [[nodiscard]] int sign() const {
    const int sa = a > 0 ? 1 : (a < 0 ? -1 : 0);
    const int sb = b > 0 ? 1 : (b < 0 ? -1 : 0);
    if (sa == 0) return sb;
    if (sb == 0 || sa == sb) return sa;
    // Opposite signs: compare a^2 with 2 b^2.
    const Q lhs = a * a;
    const Q rhs = 2 * b * b;
    if (lhs == rhs) return 0;
    return lhs > rhs ? sa : sb;
  }
  friend bool operator<(const QSqrt2& x, const QSqrt2& y) { return (x - y).sign() < 0; }
  friend bool operator==(const QSqrt2& x, const QSqrt2& y) { return x.a == y.a && x.b == y.b; }
  [[nodiscard]] double to_double() const {
    return boost::rational_cast<double>(a) + boost::rational_cast<double>(b) * std::sqrt(2.0);
  }
};

/// Node count of the tent(√2) Hofbauer tower with nodes up to `depth_cap`,
/// identifying nodes by exact endpoint equality.
inline std::size_t tent_sqrt2_tower_size(std::size_t depth_cap) {
  using Q = QSqrt2::Q;
  const QSqrt2 half{Q(1, 2), Q(0)};
  const QSqrt2 one{Q(1), Q(0)};
  const QSqrt2 s{Q(0), Q(1)};
  struct Node {
    QSqrt2 lo, hi;
    std::size_t depth;
  };
  std::vector<Node> nodes{{QSqrt2{}, one, 0}};
  auto find = [&nodes](const QSqrt2& lo, const QSqrt2& hi) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].lo == lo && nodes[i].hi == hi) return true;
    return false;
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node d = nodes[i];
    if (d.depth >= depth_cap) continue;
    // Left lap [0, 1/2], T = s x; right lap [1/2, 1], T = s (1 - x).
    for (int lap = 0; lap < 2; ++lap) {
      QSqrt2 lo = d.lo;
      QSqrt2 hi = d.hi;
      if (lap == 0 && half < hi) hi = half;
      if (lap == 1 && lo < half) lo = half;
      if (!(lo < hi)) continue;
      QSqrt2 a = lap == 0 ? s * lo : s * (one - lo);
      QSqrt2 b = lap == 0 ? s * hi : s * (one - hi);
      if (b < a) std::swap(a, b);
      if (!find(a, b)) nodes.push_back({a, b, d.depth + 1});
    }
  }
  return nodes.size();
}

}  // namespace oracle

#endif  // LDYN_TESTS_ORACLES_HPP
