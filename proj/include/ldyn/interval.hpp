#ifndef LDYN_INTERVAL_HPP
#define LDYN_INTERVAL_HPP

#include <algorithm>
#include <optional>

namespace ldyn {

/// Closed interval [lo, hi]. A single point is represented with lo == hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval hull(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }

  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] double mid() const { return lo + 0.5 * (hi - lo); }
  [[nodiscard]] bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  [[nodiscard]] bool contains(const Interval& o, double tol = 0.0) const {
    return o.lo >= lo - tol && o.hi <= hi + tol;
  }
  [[nodiscard]] bool interior_contains(double x) const { return x > lo && x < hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo, b.lo);
  const double hi = std::min(a.hi, b.hi);
  if (lo > hi) return std::nullopt;
  return Interval{lo, hi};
}

}  // namespace ldyn

#endif  // LDYN_INTERVAL_HPP
