#ifndef LDYN_SYMBOLIC_HPP
#define LDYN_SYMBOLIC_HPP

// Itineraries, cylinder sets, closest precritical points and cutting times.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ldyn/error.hpp"
#include "ldyn/interval.hpp"
#include "ldyn/interval_map.hpp"

namespace ldyn {

/// A branch index, or a critical hit carrying the index of the critical point.
struct Symbol {
  int index = 0;
  bool critical = false;

  static constexpr Symbol branch(int b) { return {b, false}; }
  static constexpr Symbol at_critical(int c = 0) { return {c, true}; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

inline constexpr Symbol kLeft = Symbol::branch(0);
inline constexpr Symbol kRight = Symbol::branch(1);
inline constexpr Symbol kCrit = Symbol::at_critical(0);

/// ASCII form: L/R/C for unimodal maps, digits (and C) otherwise.
inline std::string to_string(const std::vector<Symbol>& word, bool unimodal = true) {
  std::string s;
  s.reserve(word.size());
  for (const Symbol& sym : word) {
    if (sym.critical)
      s.push_back('C');
    else if (unimodal)
      s.push_back(sym.index == 0 ? 'L' : 'R');
    else
      s.push_back(static_cast<char>('0' + sym.index));
  }
  return s;
}

inline std::vector<Symbol> parse_word(std::string_view text) {
  std::vector<Symbol> word;
  word.reserve(text.size());
  for (char ch : text) {
    if (ch == 'L')
      word.push_back(kLeft);
    else if (ch == 'R')
      word.push_back(kRight);
    else if (ch == 'C')
      word.push_back(kCrit);
    else if (ch >= '0' && ch <= '9')
      word.push_back(Symbol::branch(ch - '0'));
    else
      throw Error(ErrorKind::invalid_argument, std::string("bad itinerary symbol '") + ch + "'");
  }
  return word;
}

struct Itinerary {
  double source = 0.0;
  std::vector<Symbol> symbols;

  [[nodiscard]] std::size_t size() const { return symbols.size(); }
  [[nodiscard]] std::string str(bool unimodal = true) const { return to_string(symbols, unimodal); }
};

template <class Real>
Symbol symbol_of(const IntervalMap& map, const Real& x, double critical_tol) {
  const auto& cps = map.critical_points();
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if constexpr (std::is_same_v<Real, double>) {
      if (std::fabs(x - cps[i].location) < critical_tol || x == cps[i].location)
        return Symbol::at_critical(static_cast<int>(i));
    } else {
      if (x == cps[i].location) return Symbol::at_critical(static_cast<int>(i));
    }
  }
  return Symbol::branch(static_cast<int>(*map.branch_of(x)));
}

/// Symbols of x, f(x), ..., f^{n-1}(x). Extended-precision orbits only treat exact hits as C.
template <class Real>
std::vector<Symbol> itinerary_symbols(const IntervalMap& map, Real x, std::size_t n,
                                      double critical_tol = kCriticalProximity) {
  std::vector<Symbol> word;
  word.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    word.push_back(symbol_of(map, x, critical_tol));
    if (i + 1 < n) x = step(map, x, i + 1);
  }
  return word;
}

inline Itinerary itinerary(const IntervalMap& map, double x, std::size_t n,
                           double critical_tol = kCriticalProximity) {
  return {x, itinerary_symbols(map, x, n, critical_tol)};
}

/// Endpoints of the cylinder {x : itinerary(x, |w|) = w}, pulled back from the domain.
/// Empty when the word is not realised.
template <class Real>
std::optional<std::pair<Real, Real>> cylinder_endpoints(const IntervalMap& map, const std::vector<Symbol>& word) {
  Real lo(map.domain().lo);
  Real hi(map.domain().hi);
  for (std::size_t k = word.size(); k-- > 0;) {
    if (word[k].critical) throw Error(ErrorKind::invalid_argument, "cylinder word contains a critical symbol");
    const auto b = static_cast<std::size_t>(word[k].index);
    if (b >= map.branch_count()) throw Error(ErrorKind::invalid_argument, "symbol names a missing branch");
    const Interval& img = map.branches()[b].image;
    if (hi < img.lo || lo > img.hi) return std::nullopt;
    auto [plo, phi] = pullback(map, b, lo, hi);
    lo = std::move(plo);
    hi = std::move(phi);
  }
  return std::pair<Real, Real>{std::move(lo), std::move(hi)};
}

inline std::optional<Interval> cylinder(const IntervalMap& map, const std::vector<Symbol>& word) {
  auto ends = cylinder_endpoints<double>(map, word);
  if (!ends) return std::nullopt;
  return Interval{ends->first, ends->second};
}

/// Widths of the nested cylinders of w[0..j], j = 0..|w|-1. Quadratic cost.
inline std::vector<double> prefix_widths(const IntervalMap& map, const std::vector<Symbol>& word) {
  std::vector<double> widths;
  widths.reserve(word.size());
  for (std::size_t j = 1; j <= word.size(); ++j) {
    const auto cyl = cylinder(map, std::vector<Symbol>(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(j)));
    widths.push_back(cyl ? cyl->width() : 0.0);
  }
  return widths;
}

/// Closest precritical points z_k < c, their mirrors zhat_k > c, and cutting times S_k.
struct KneadingData {
  std::vector<double> z;
  std::vector<double> zhat;
  std::vector<std::size_t> S;
  bool truncated = false;
  std::string truncation_reason;

  [[nodiscard]] std::size_t size() const { return z.size(); }
};

struct KneadingOptions {
  /// Longest gap S_{k+1} - S_k searched before declaring truncation.
  std::size_t max_gap = 4096;
  /// Successive z_k closer than this signal convergence to a basin boundary.
  double convergence_tol = 1e-14;
};

/// Computes (z_k, zhat_k, S_k) for k = 0..K by pulling c back along the
/// kneading sequence; fewer entries with `truncated` set if the critical
/// orbit is captured before depth K.
inline KneadingData kneading(const IntervalMap& map, std::size_t K, const KneadingOptions& opt = {}) {
  if (!map.is_unimodal()) throw Error(ErrorKind::not_unimodal, "kneading data needs a unimodal map");
  const double c = map.critical_point();
  KneadingData out;
  if (map(c) <= c) {
    out.truncated = true;
    out.truncation_reason = "critical value does not exceed c; c has no proper preimage";
    return out;
  }

  // Critical orbit c_j = f^j(c), extended on demand.
  std::vector<double> crit{c};
  auto crit_at = [&](std::size_t j) {
    while (crit.size() <= j) crit.push_back(step(map, crit.back(), crit.size()));
    return crit[j];
  };

  out.z.push_back(map.inverse(0, c));
  out.S.push_back(1);
  while (out.z.size() <= K) {
    const std::size_t s = out.S.back();
    std::optional<std::size_t> next;
    for (std::size_t n = s + 1; n <= s + opt.max_gap; ++n) {
      const double a = crit_at(n - s);
      const double b = crit_at(n);
      if (a == c || b == c) break;  // c is periodic: the central branch never gets cut again
      if ((a < c && c < b) || (b < c && c < a)) {
        next = n;
        break;
      }
    }
    if (!next) {
      out.truncated = true;
      out.truncation_reason = "no further cutting time; critical orbit captured";
      break;
    }
    // Points just left of c follow the kneading sequence for times 1..n-1.
    double y = c;
    for (std::size_t j = *next - 1; j >= 1; --j) y = map.inverse(*map.branch_of(crit_at(j)), y);
    y = map.inverse(0, y);
    if (std::fabs(y - out.z.back()) < opt.convergence_tol || !(y > out.z.back() && y < c)) {
      out.truncated = true;
      out.truncation_reason = "precritical points converged (basin boundary or precision limit)";
      break;
    }
    out.z.push_back(y);
    out.S.push_back(*next);
  }
  out.zhat.reserve(out.z.size());
  // Reflection is exact; the inverse branch loses half the digits next to c.
  for (double zk : out.z) out.zhat.push_back(map.is_symmetric() ? 2.0 * c - zk : map.inverse(1, map(zk)));
  return out;
}

}  // namespace ldyn

#endif  // LDYN_SYMBOLIC_HPP
