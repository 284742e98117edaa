#ifndef LDYN_INTERVAL_MAP_HPP
#define LDYN_INTERVAL_MAP_HPP

// Piecewise-monotone interval maps: the closed-form families (logistic,
// sine, tent), their derivatives and inverse branches, orbits and
// log-derivative sums.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ldyn/big_float.hpp"
#include "ldyn/error.hpp"
#include "ldyn/interval.hpp"

namespace ldyn {

enum class Family { logistic, sine, tent };
enum class Orientation { increasing, decreasing };

/// Distance within which an orbit point counts as an exact critical hit.
inline constexpr double kCriticalProximity = 1e-13;
/// Orbit points this far outside the domain are clamped back; further is an error.
inline constexpr double kClampTolerance = 1e-12;

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::logistic: return "logistic";
    case Family::sine: return "sine";
    case Family::tent: return "tent";
  }
  return "?";
}

inline Family parse_family(std::string_view name) {
  if (name == "logistic") return Family::logistic;
  if (name == "sine") return Family::sine;
  if (name == "tent") return Family::tent;
  throw Error(ErrorKind::unknown_family, "unknown map family '" + std::string(name) + "'");
}

/// A critical (turning) point. `order` is empty for non-smooth turning points (tent).
struct CriticalPoint {
  double location = 0.0;
  std::optional<double> order;
};

/// A lap of monotonicity. Evaluators live on the owning IntervalMap.
struct Branch {
  Interval domain;
  Orientation orientation = Orientation::increasing;
  Interval image;
};

class IntervalMap {
 public:
  /// Builds a family member; throws on unknown family or out-of-range parameter.
  /// Sine takes no parameter: pass NaN (or 1).
  IntervalMap(Family family, double param) : family_(family), param_(param) {
    switch (family) {
      case Family::logistic:
        if (!(param > 0.0 && param <= 4.0))
          throw Error(ErrorKind::parameter_out_of_range, "logistic parameter must lie in (0, 4]");
        deriv_sup_ = param;
        critical_ = {{0.5, 2.0}};
        break;
      case Family::tent:
        if (!(param > 1.0 && param <= 2.0))
          throw Error(ErrorKind::parameter_out_of_range, "tent slope must lie in (1, 2]");
        deriv_sup_ = param;
        critical_ = {{0.5, std::nullopt}};
        break;
      case Family::sine:
        if (!std::isnan(param) && param != 1.0)
          throw Error(ErrorKind::parameter_out_of_range, "sine takes no parameter");
        param_ = std::numeric_limits<double>::quiet_NaN();
        deriv_sup_ = std::numbers::pi;
        critical_ = {{0.5, 2.0}};
        break;
    }
    const double top = eval(0, 0.5);
    branches_ = {Branch{{0.0, 0.5}, Orientation::increasing, {0.0, top}},
                 Branch{{0.5, 1.0}, Orientation::decreasing, {0.0, top}}};
  }

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] double param() const { return param_; }
  [[nodiscard]] Interval domain() const { return {0.0, 1.0}; }
  [[nodiscard]] const std::vector<Branch>& branches() const { return branches_; }
  [[nodiscard]] std::size_t branch_count() const { return branches_.size(); }
  [[nodiscard]] const std::vector<CriticalPoint>& critical_points() const { return critical_; }
  [[nodiscard]] double deriv_sup() const { return deriv_sup_; }
  [[nodiscard]] bool is_unimodal() const { return branches_.size() == 2 && critical_.size() == 1; }
  /// False for the tent family, which only serves as a reference map.
  [[nodiscard]] bool is_c3() const { return family_ != Family::tent; }
  [[nodiscard]] double critical_point() const { return critical_.front().location; }
  /// Every family satisfies f(1 - x) = f(x).
  [[nodiscard]] bool is_symmetric() const { return true; }

  /// "logistic:4", "tent:1.5", "sine".
  [[nodiscard]] std::string name() const {
    if (family_ == Family::sine) return "sine";
    std::ostringstream os;
    os.precision(17);
    os << to_string(family_) << ':' << param_;
    return os.str();
  }

  /// Branch formula evaluated anywhere on the closed branch (one-sided limits at ends).
  template <class Real>
  [[nodiscard]] Real eval(std::size_t branch, const Real& x) const {
    switch (family_) {
      case Family::logistic: return param_ * x * (1.0 - x);
      case Family::tent: return branch == 0 ? param_ * x : param_ * (1.0 - x);
      case Family::sine: {
        using std::sin;
        const Real pi = pi_as<Real>();
        return branch == 0 ? Real(sin(pi * x)) : Real(sin(pi * (1.0 - x)));
      }
    }
    return x;
  }

  template <class Real>
  [[nodiscard]] Real derivative(std::size_t branch, const Real& x) const {
    switch (family_) {
      case Family::logistic: return param_ * (1.0 - 2.0 * x);
      case Family::tent: return Real(branch == 0 ? param_ : -param_);
      case Family::sine: {
        using std::cos;
        const Real pi = pi_as<Real>();
        return branch == 0 ? Real(pi * cos(pi * x)) : Real(-(pi * cos(pi * (1.0 - x))));
      }
    }
    return x;
  }

  /// Inverse of a branch. `y` is clamped into the branch image first.
  template <class Real>
  [[nodiscard]] Real inverse(std::size_t branch, Real y) const {
    using std::acos;
    using std::asin;
    using std::sqrt;
    const Interval& img = branches_[branch].image;
    if (y < img.lo) y = Real(img.lo);
    if (y > img.hi) y = Real(img.hi);
    Real left(0.0);
    switch (family_) {
      case Family::logistic: {
        // 4y/a, then the root of x(1-x) = t/4 on [0, 1/2] in a cancellation-free form.
        const Real t = y * (4.0 / param_);
        const Real one_minus_t = 1.0 - t;
        const Real s = sqrt(one_minus_t < 0.0 ? Real(0.0) : one_minus_t);
        left = t < 0.5 ? Real(t / (2.0 * (1.0 + s))) : Real(0.5 - s / 2.0);
        break;
      }
      case Family::tent: left = y / param_; break;
      case Family::sine: {
        const Real pi = pi_as<Real>();
        left = y < 0.5 ? Real(asin(y) / pi) : Real(0.5 - acos(y) / pi);
        break;
      }
    }
    if (branch == 0) return left;
    if (family_ == Family::logistic && !(y * (4.0 / param_) < 0.5)) {
      const Real one_minus_t = 1.0 - y * (4.0 / param_);
      return 0.5 + sqrt(one_minus_t < 0.0 ? Real(0.0) : one_minus_t) / 2.0;
    }
    return 1.0 - left;
  }

  /// Branch containing x; empty exactly at a critical point.
  template <class Real>
  [[nodiscard]] std::optional<std::size_t> branch_of(const Real& x) const {
    const double c = critical_point();
    if (x < c) return 0;
    if (x > c) return 1;
    return std::nullopt;
  }

  template <class Real>
  [[nodiscard]] Real operator()(const Real& x) const {
    return eval(x < critical_point() ? 0 : 1, x);
  }

  /// Zero at the critical point of a smooth family. The tent's corner has
  /// one-sided slopes ±s, and |Df(c)| = s is used there.
  template <class Real>
  [[nodiscard]] Real derivative(const Real& x) const {
    if (x == critical_point()) return Real(family_ == Family::tent ? param_ : 0.0);
    return derivative(x < critical_point() ? 0 : 1, x);
  }

  [[nodiscard]] bool is_critical(double x, double tol = 0.0) const {
    for (const auto& cp : critical_)
      if (std::fabs(x - cp.location) <= tol) return true;
    return false;
  }
  [[nodiscard]] bool is_critical(const BigFloat& x) const {
    for (const auto& cp : critical_)
      if (x == cp.location) return true;
    return false;
  }

 private:
  Family family_;
  double param_;
  double deriv_sup_ = 1.0;
  std::vector<Branch> branches_;
  std::vector<CriticalPoint> critical_;
};

/// make_family: "logistic" (a in (0,4]), "sine" (no parameter), "tent" (slope in (1,2]).
inline IntervalMap make_family(std::string_view name, double param = std::numeric_limits<double>::quiet_NaN()) {
  return IntervalMap(parse_family(name), param);
}

/// Parses "logistic:4", "tent:1.5" or "sine".
inline IntervalMap parse_map(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return make_family(text);
  const std::string value(text.substr(colon + 1));
  std::size_t used = 0;
  double param = 0.0;
  try {
    param = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty())
    throw Error(ErrorKind::invalid_argument, "bad map parameter '" + value + "'");
  return make_family(text.substr(0, colon), param);
}

namespace detail {
template <class Real>
Real clamp_to_domain(const IntervalMap& map, Real y, std::size_t step) {
  const Interval d = map.domain();
  if (y < d.lo) {
    if (y < d.lo - kClampTolerance)
      throw Error(ErrorKind::domain_escape, "iterate left the domain", step);
    return Real(d.lo);
  }
  if (y > d.hi) {
    if (y > d.hi + kClampTolerance)
      throw Error(ErrorKind::domain_escape, "iterate left the domain", step);
    return Real(d.hi);
  }
  return y;
}
}  // namespace detail

/// One forward step with the boundary clamp applied.
template <class Real>
Real step(const IntervalMap& map, const Real& x, std::size_t index = 0) {
  return detail::clamp_to_domain(map, map(x), index);
}

/// (x, f(x), ..., f^n(x)).
template <class Real>
std::vector<Real> eval_orbit(const IntervalMap& map, Real x, std::size_t n) {
  if (!map.domain().contains(to_double(x), kClampTolerance))
    throw Error(ErrorKind::domain_escape, "start point outside the domain", 0);
  x = detail::clamp_to_domain(map, x, 0);
  std::vector<Real> orbit;
  orbit.reserve(n + 1);
  orbit.push_back(x);
  for (std::size_t i = 0; i < n; ++i) {
    x = step(map, x, i + 1);
    orbit.push_back(x);
  }
  return orbit;
}

/// log|Df(x)| with the critical-hit check; `index` is reported on failure.
template <class Real>
double log_abs_derivative(const IntervalMap& map, const Real& x, std::size_t index) {
  const Real d = map.derivative(x);
  const double v = log_abs(d);
  if (std::isinf(v)) throw Error(ErrorKind::derivative_zero, "derivative zero on orbit", index);
  return v;
}

/// Sum_{i<n} log|Df(f^i(x))|, accumulated in log space in double precision.
inline double log_deriv_sum(const IntervalMap& map, double x, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += log_abs_derivative(map, x, i);
    x = step(map, x, i + 1);
  }
  return sum;
}

/// Working precision that keeps an n-step orbit from a double start accurate to
/// roughly 2^-128 in absolute terms.
inline mpfr_prec_t high_fidelity_bits(const IntervalMap& map, std::size_t n) {
  const double per_step = std::max(1.0, std::log2(map.deriv_sup()));
  return static_cast<mpfr_prec_t>(std::ceil(static_cast<double>(n) * per_step)) + 128;
}

/// Per-step log-derivative terms of the exact orbit of the double `x`,
/// evaluated in extended precision and rounded to double.
inline std::vector<double> log_deriv_terms_high(const IntervalMap& map, double x, std::size_t n) {
  PrecisionScope scope(high_fidelity_bits(map, n));
  std::vector<double> terms;
  terms.reserve(n);
  BigFloat y(x);
  for (std::size_t i = 0; i < n; ++i) {
    terms.push_back(log_abs_derivative(map, y, i));
    y = step(map, y, i + 1);
  }
  return terms;
}

/// High-fidelity log_deriv_sum: extended-precision orbit, exact accumulation.
/// Satisfies the cocycle identity exactly (see ExactSum).
inline ExactSum log_deriv_sum_high(const IntervalMap& map, double x, std::size_t n) {
  ExactSum sum;
  for (double t : log_deriv_terms_high(map, x, n)) sum += t;
  return sum;
}

/// pullback: preimage under branch `b` of J ∩ image(b), as a subinterval of the branch domain.
template <class Real>
std::pair<Real, Real> pullback(const IntervalMap& map, std::size_t b, const Real& lo, const Real& hi) {
  const Interval& img = map.branches().at(b).image;
  const Real a = lo < img.lo ? Real(img.lo) : lo;
  const Real z = hi > img.hi ? Real(img.hi) : hi;
  if (a > z) throw Error(ErrorKind::empty_intersection, "interval misses the branch image");
  Real pa = map.inverse(b, a);
  Real pz = map.inverse(b, z);
  if (map.branches()[b].orientation == Orientation::decreasing) std::swap(pa, pz);
  return {pa, pz};
}

inline Interval pullback(const IntervalMap& map, std::size_t b, const Interval& j) {
  auto [lo, hi] = pullback<double>(map, b, j.lo, j.hi);
  return {lo, hi};
}

}  // namespace ldyn

#endif  // LDYN_INTERVAL_MAP_HPP
