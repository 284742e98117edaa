#ifndef LDYN_INDUCED_HPP
#define LDYN_INDUCED_HPP

// Induced Markov map F = f^{S_k} on U_k = (z_k, z_{k+1}) and its mirror
// Û_k = (zhat_{k+1}, zhat_k), built from the closest precritical points,
// with the bookkeeping that splits Λ along induced returns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ldyn/big_float.hpp"
#include "ldyn/error.hpp"
#include "ldyn/interval.hpp"
#include "ldyn/interval_map.hpp"
#include "ldyn/lyapunov.hpp"
#include "ldyn/symbolic.hpp"

namespace ldyn {

/// Which of (z0,c), (z1,c), (c,zhat0), (c,zhat1) an image matches, if any.
enum class ImageClass { none, z0_c, z1_c, c_zhat0, c_zhat1 };

inline std::string_view to_string(ImageClass k) {
  switch (k) {
    case ImageClass::z0_c: return "(z0,c)";
    case ImageClass::z1_c: return "(z1,c)";
    case ImageClass::c_zhat0: return "(c,zhat0)";
    case ImageClass::c_zhat1: return "(c,zhat1)";
    case ImageClass::none: break;
  }
  return "none";
}

struct InducedBranch {
  std::size_t k = 0;
  std::size_t S = 0;
  Interval U;
  Interval U_hat;
  Interval image;
  Interval image_hat;
  /// The symbols of f^j(U_k), j < S.
  std::vector<Symbol> word;
  std::vector<Symbol> word_hat;
  /// |f^S(z_k) - c|.
  double critical_residual = 0.0;
  bool monotone = false;
  bool image_touches_c = false;
  ImageClass image_class = ImageClass::none;
  double distortion = 1.0;
  /// Distortion of f^S on (z_{k-1}, c); empty for k = 0.
  std::optional<double> distortion_extended;
  /// |F(c) - F(z_{k+1})|, |F(z_{k+1}) - F(z_k)|, |F(z_k) - F(z_{k-1})| with F = f^S.
  double gap_c = 0.0;
  double gap_inner = 0.0;
  std::optional<double> gap_outer;
};

struct InducedOptions {
  std::size_t grid = 64;
  double class_tol = 1e-9;
};

struct InducedMap {
  IntervalMap map;
  KneadingData kneading;
  std::vector<InducedBranch> branches;
  /// 1 <= S_k - S_{k-1} <= 2 for every computed k.
  bool property1 = false;
  /// (1/k) log |z_k - z_{k+1}|^{-1} for k >= 1; reported, not judged.
  std::vector<double> property3;
  bool truncated = false;
  std::string truncation_reason;

  [[nodiscard]] std::size_t size() const { return branches.size(); }
  [[nodiscard]] double z(std::size_t k) const { return kneading.z.at(k); }
  [[nodiscard]] double zhat(std::size_t k) const { return kneading.zhat.at(k); }

  /// Branch index and side (false = U_k, true = Û_k) of x; empty off the built domain or on a boundary.
  [[nodiscard]] std::optional<std::pair<std::size_t, bool>> locate(double x) const {
    for (const InducedBranch& b : branches) {
      if (b.U.lo < x && x < b.U.hi) return std::pair{b.k, false};
      if (b.U_hat.lo < x && x < b.U_hat.hi) return std::pair{b.k, true};
    }
    return std::nullopt;
  }
};

namespace detail {
inline double iterate(const IntervalMap& map, double x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x = step(map, x, i + 1);
  return x;
}

/// log|Df^n(x)|; -inf if the orbit meets c.
inline double log_deriv_n(const IntervalMap& map, double x, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = map.derivative(x);
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    sum += std::log(std::fabs(d));
    x = step(map, x, i + 1);
  }
  return sum;
}

inline double grid_distortion(const IntervalMap& map, const Interval& J, std::size_t S, std::size_t grid) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = J.lo + (static_cast<double>(i) + 0.5) / static_cast<double>(grid) * J.width();
    const double v = log_deriv_n(map, x, S);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return std::exp(hi - lo);
}

/// Sign of Df^S on a grid of J, and whether no image f^j(J), 0 < j < S, has c in its interior.
inline bool check_monotone(const IntervalMap& map, const Interval& J, std::size_t S, std::size_t grid) {
  int sign = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = J.lo + (static_cast<double>(i) + 0.5) / static_cast<double>(grid) * J.width();
    double y = x;
    int s = 1;
    for (std::size_t j = 0; j < S; ++j) {
      const double d = map.derivative(y);
      if (d == 0.0) return false;
      if (d < 0.0) s = -s;
      y = step(map, y, j + 1);
    }
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  const double c = map.critical_point();
  double a = J.lo;
  double b = J.hi;
  for (std::size_t j = 0; j < S; ++j) {
    if (std::min(a, b) < c && c < std::max(a, b)) return false;
    a = step(map, a, j + 1);
    b = step(map, b, j + 1);
  }
  return true;
}

inline std::vector<Symbol> branch_word(const IntervalMap& map, const Interval& J, std::size_t S) {
  return itinerary_symbols(map, J.mid(), S);
}
}  // namespace detail

/// Builds branches k = 0..K from kneading(map, K+1). Fewer branches, with
/// `truncated` set, if the kneading data stops early.
inline InducedMap build_induced(const IntervalMap& map, std::size_t K, const InducedOptions& opt = {}) {
  InducedMap im{map, kneading(map, K + 1), {}, false, {}, false, {}};
  const KneadingData& kd = im.kneading;
  im.truncated = kd.truncated;
  im.truncation_reason = kd.truncation_reason;
  if (kd.size() < 2) return im;
  const std::size_t nb = std::min(K + 1, kd.size() - 1);
  const double c = map.critical_point();

  im.property1 = true;
  for (std::size_t k = 1; k < kd.S.size(); ++k) {
    const std::size_t inc = kd.S[k] - kd.S[k - 1];
    if (inc < 1 || inc > 2) im.property1 = false;
  }
  for (std::size_t k = 1; k + 1 < kd.z.size(); ++k)
    im.property3.push_back(-std::log(std::fabs(kd.z[k] - kd.z[k + 1])) / static_cast<double>(k));

  const double z0 = kd.z[0];
  const double z1 = kd.z.size() > 1 ? kd.z[1] : std::numeric_limits<double>::quiet_NaN();
  const double zh0 = kd.zhat[0];
  const double zh1 = kd.zhat.size() > 1 ? kd.zhat[1] : std::numeric_limits<double>::quiet_NaN();

  for (std::size_t k = 0; k < nb; ++k) {
    InducedBranch b;
    b.k = k;
    b.S = kd.S[k];
    b.U = {kd.z[k], kd.z[k + 1]};
    b.U_hat = {kd.zhat[k + 1], kd.zhat[k]};
    b.word = detail::branch_word(map, b.U, b.S);
    b.word_hat = detail::branch_word(map, b.U_hat, b.S);

    const double fz = detail::iterate(map, kd.z[k], b.S);
    const double fz1 = detail::iterate(map, kd.z[k + 1], b.S);
    b.critical_residual = std::fabs(fz - c);
    b.image = Interval::hull(fz, fz1);
    b.image_hat = Interval::hull(detail::iterate(map, kd.zhat[k], b.S), detail::iterate(map, kd.zhat[k + 1], b.S));
    b.image_touches_c = std::fabs(b.image.lo - c) < opt.class_tol || std::fabs(b.image.hi - c) < opt.class_tol;
    b.monotone = detail::check_monotone(map, b.U, b.S, opt.grid) && detail::check_monotone(map, b.U_hat, b.S, opt.grid);

    auto near = [&](double a, double v) { return std::fabs(a - v) <= opt.class_tol; };
    if (near(b.image.hi, c) && near(b.image.lo, z0))
      b.image_class = ImageClass::z0_c;
    else if (near(b.image.hi, c) && near(b.image.lo, z1))
      b.image_class = ImageClass::z1_c;
    else if (near(b.image.lo, c) && near(b.image.hi, zh0))
      b.image_class = ImageClass::c_zhat0;
    else if (near(b.image.lo, c) && near(b.image.hi, zh1))
      b.image_class = ImageClass::c_zhat1;

    b.distortion = std::max(detail::grid_distortion(map, b.U, b.S, opt.grid),
                            detail::grid_distortion(map, b.U_hat, b.S, opt.grid));
    if (k >= 1) b.distortion_extended = detail::grid_distortion(map, {kd.z[k - 1], c}, b.S, opt.grid);

    b.gap_c = std::fabs(detail::iterate(map, c, b.S) - fz1);
    b.gap_inner = std::fabs(fz1 - fz);
    if (k >= 1) b.gap_outer = std::fabs(fz - detail::iterate(map, kd.z[k - 1], b.S));
    im.branches.push_back(std::move(b));
  }
  return im;
}

struct InducedItinerary {
  double x = 0.0;
  std::vector<std::size_t> chi;
  std::vector<bool> mirrored;
  /// t_0 = 0, t_{i+1} = t_i + S_{chi_i}.
  std::vector<std::size_t> t;
  /// log|Df^{S_{chi_i}}(x_i)|.
  std::vector<double> contributions;
  /// x_i = F^i(x), rounded.
  std::vector<double> points;
  /// Largest |F^i(x) - f^{t_i}(x)| over the run; both are extended-precision.
  double max_orbit_mismatch = 0.0;
  /// (1/t_n) log|Df^{t_n}(x)| from a separate derivative product.
  double direct = 0.0;
  /// (Σ contributions) / (Σ S_{chi_i}).
  double assembled = 0.0;
  bool truncated = false;
  std::string truncation_reason;

  [[nodiscard]] std::size_t steps() const { return chi.size(); }
};

/// Follows x through n induced steps in extended precision.
inline InducedItinerary induced_profile(const InducedMap& im, double x, std::size_t n) {
  InducedItinerary out;
  out.x = x;
  out.t.push_back(0);
  if (im.branches.empty()) {
    out.truncated = true;
    out.truncation_reason = "no induced branches";
    return out;
  }
  std::size_t max_s = 0;
  for (const InducedBranch& b : im.branches) max_s = std::max(max_s, b.S);
  PrecisionScope scope(high_fidelity_bits(im.map, n * max_s));
  const IntervalMap& map = im.map;

  BigFloat y(x);
  ExactSum total;
  for (std::size_t i = 0; i < n; ++i) {
    const auto where = im.locate(y.to_double());
    if (!where) {
      out.truncated = true;
      out.truncation_reason = "orbit left the built branches at induced step " + std::to_string(i);
      break;
    }
    const InducedBranch& b = im.branches[where->first];
    out.chi.push_back(b.k);
    out.mirrored.push_back(where->second);
    out.points.push_back(y.to_double());
    ExactSum contrib;
    for (std::size_t j = 0; j < b.S; ++j) {
      contrib += log_abs_derivative(map, y, out.t.back() + j);
      y = step(map, y, out.t.back() + j + 1);
    }
    out.contributions.push_back(contrib.value());
    total += contrib;
    out.t.push_back(out.t.back() + b.S);
  }
  const std::size_t tn = out.t.back();
  if (tn == 0) return out;
  out.assembled = total.value() / static_cast<double>(tn);

  // Independent pass: one forward orbit of length t_n, derivative as a product.
  BigFloat z(x);
  BigFloat prod(1.0);
  std::size_t next = 0;
  for (std::size_t j = 0; j <= tn; ++j) {
    if (next < out.points.size() && j == out.t[next]) {
      out.max_orbit_mismatch = std::max(out.max_orbit_mismatch, std::fabs(z.to_double() - out.points[next]));
      ++next;
    }
    if (j == tn) break;
    prod *= map.derivative(z);
    z = step(map, z, j + 1);
  }
  out.direct = log_abs(prod) / static_cast<double>(tn);
  return out;
}

/// A point whose induced itinerary follows `chi`, found by pulling the last
/// branch back through the earlier ones. At each step the branch side
/// (U or Û) meeting the previous image is used.
inline std::optional<double> design_induced_point(const InducedMap& im, const std::vector<std::size_t>& chi) {
  if (chi.empty()) return std::nullopt;
  for (std::size_t k : chi)
    if (k >= im.branches.size()) throw Error(ErrorKind::invalid_argument, "induced itinerary names an unbuilt branch");
  const IntervalMap& map = im.map;

  // Choose sides forward so that each branch sits inside the previous image.
  std::vector<bool> side(chi.size(), false);
  for (std::size_t i = 1; i < chi.size(); ++i) {
    const InducedBranch& prev = im.branches[chi[i - 1]];
    const Interval img = side[i - 1] ? prev.image_hat : prev.image;
    const InducedBranch& cur = im.branches[chi[i]];
    if (intersect(img, cur.U))
      side[i] = false;
    else if (intersect(img, cur.U_hat))
      side[i] = true;
    else
      return std::nullopt;
  }

  const InducedBranch& last = im.branches[chi.back()];
  std::pair<BigFloat, BigFloat> J;
  std::size_t total_s = 0;
  for (std::size_t k : chi) total_s += im.branches[k].S;
  PrecisionScope scope(high_fidelity_bits(map, total_s));
  {
    const Interval u = side.back() ? last.U_hat : last.U;
    J = {BigFloat(u.lo), BigFloat(u.hi)};
  }
  for (std::size_t i = chi.size() - 1; i-- > 0;) {
    const InducedBranch& b = im.branches[chi[i]];
    const std::vector<Symbol>& w = side[i] ? b.word_hat : b.word;
    for (std::size_t j = w.size(); j-- > 0;) {
      try {
        J = pullback(map, static_cast<std::size_t>(w[j].index), J.first, J.second);
      } catch (const Error&) {
        return std::nullopt;
      }
    }
  }
  return ((J.first + J.second) / 2.0).to_double();
}

}  // namespace ldyn

#endif  // LDYN_INDUCED_HPP
