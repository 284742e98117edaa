#ifndef LDYN_ORBIT_DESIGN_HPP
#define LDYN_ORBIT_DESIGN_HPP

// Points with prescribed block itineraries, and the experiment showing that
// the sign of the lower pointwise exponent is not a conjugacy invariant.
//
// Designed orbits pass within 2^-(1.1 n) of the critical point, far below
// double resolution, so design and profiling run in extended precision
// throughout. The working precision is sized from the schedule length and
// doubled until the recomputed itinerary matches the schedule.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ldyn/big_float.hpp"
#include "ldyn/conjugacy.hpp"
#include "ldyn/error.hpp"
#include "ldyn/interval_map.hpp"
#include "ldyn/lyapunov.hpp"
#include "ldyn/symbolic.hpp"

namespace ldyn {

enum class BlockKind { stay_right, stay_left, approach };

struct Block {
  BlockKind kind = BlockKind::stay_right;
  std::size_t length = 1;  // always 1 for approach
};

/// An ordered list of symbolic blocks. Times are 0-based orbit indices.
class BlockSchedule {
 public:
  BlockSchedule() = default;

  BlockSchedule& stay_right(std::size_t len) { return push({BlockKind::stay_right, len}); }
  BlockSchedule& stay_left(std::size_t len) { return push({BlockKind::stay_left, len}); }
  /// One step at which the orbit is forced next to c: symbol R, followed by
  /// R (the image lands near 1) and then an L-block near 0.
  BlockSchedule& approach() { return push({BlockKind::approach, 1}); }

  /// R^{n_1} A R L^{...} R^{...} A R L^{...} ... with n_{k+1} = growth * n_k.
  /// At stage k the orbit is near p on [.., n_k), near c at n_k, near 1 at
  /// n_k + 1 and near 0 on [n_k + 2, floor(total_factor * n_k)].
  static BlockSchedule counterexample(std::size_t n1, std::size_t depth, std::size_t growth = 10,
                                      double total_factor = 2.1) {
    if (n1 < 2 || depth < 1) throw Error(ErrorKind::invalid_argument, "counterexample needs n1 >= 2 and depth >= 1");
    if (growth < 2) throw Error(ErrorKind::invalid_argument, "stage growth ratio must be at least 2");
    BlockSchedule s;
    s.total_factor_ = total_factor;
    std::size_t t = 0;
    std::size_t n = n1;
    for (std::size_t k = 0; k < depth; ++k, n *= growth) {
      const auto end = static_cast<std::size_t>(std::floor(total_factor * static_cast<double>(n)));
      if (end < n + 2) throw Error(ErrorKind::invalid_argument, "total factor leaves no room for the L-block");
      s.stay_right(n - t).approach().stay_right(1).stay_left(end - n - 1);
      s.stages_.push_back(n);
      t = end + 1;
    }
    return s;
  }

  [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }
  /// The approach times n_k.
  [[nodiscard]] const std::vector<std::size_t>& stages() const { return stages_; }
  [[nodiscard]] double total_factor() const { return total_factor_; }

  [[nodiscard]] std::size_t length() const {
    std::size_t n = 0;
    for (const Block& b : blocks_) n += b.length;
    return n;
  }

  [[nodiscard]] std::vector<Symbol> symbols() const {
    std::vector<Symbol> w;
    w.reserve(length());
    for (const Block& b : blocks_) w.insert(w.end(), b.length, b.kind == BlockKind::stay_left ? kLeft : kRight);
    return w;
  }

  /// Times at which an approach block sits.
  [[nodiscard]] std::vector<std::size_t> approach_times() const {
    std::vector<std::size_t> out;
    std::size_t t = 0;
    for (const Block& b : blocks_) {
      if (b.kind == BlockKind::approach) out.push_back(t);
      t += b.length;
    }
    return out;
  }

  /// {1 + n_k, floor(total_factor * n_k)} for every stage.
  [[nodiscard]] std::vector<std::size_t> checkpoints() const {
    std::vector<std::size_t> cps;
    for (std::size_t n : stages_) {
      cps.push_back(n + 1);
      cps.push_back(static_cast<std::size_t>(std::floor(total_factor_ * static_cast<double>(n))));
    }
    return cps;
  }

 private:
  BlockSchedule& push(Block b) {
    if (b.length == 0) throw Error(ErrorKind::invalid_argument, "block lengths must be positive");
    blocks_.push_back(b);
    return *this;
  }

  std::vector<Block> blocks_;
  std::vector<std::size_t> stages_;
  double total_factor_ = 2.1;
};

struct DesignedPoint {
  BigFloat x;
  double x_double = 0.0;
  std::vector<Symbol> itinerary;
  /// log2 of the width of the cylinder x was taken from.
  double log2_width = 0.0;
  mpfr_prec_t precision = 0;
  bool complete = false;
};

struct DesignOptions {
  mpfr_prec_t extra_bits = 256;
  int max_doublings = 3;
};

/// Midpoint of the cylinder of `word`, pulled back from the whole domain in
/// extended precision. Throws empty_cylinder when the word is not realised
/// and precision_exhausted when the itinerary cannot be confirmed.
inline DesignedPoint design_point(const IntervalMap& map, const std::vector<Symbol>& word,
                                  const DesignOptions& opt = {}) {
  if (word.empty()) throw Error(ErrorKind::invalid_argument, "empty schedule");
  const double per_step = std::max(1.0, std::log2(map.deriv_sup()));
  auto bits = static_cast<mpfr_prec_t>(std::ceil(static_cast<double>(word.size()) * per_step)) + opt.extra_bits;
  for (int attempt = 0; attempt <= opt.max_doublings; ++attempt, bits *= 2) {
    PrecisionScope scope(bits);
    const auto ends = cylinder_endpoints<BigFloat>(map, word);
    if (!ends) throw Error(ErrorKind::empty_cylinder, "schedule word is not realised by " + map.name());
    const BigFloat width = ends->second - ends->first;
    if (width.sign() <= 0) continue;
    BigFloat x = (ends->first + ends->second) / 2.0;
    std::vector<Symbol> it = itinerary_symbols(map, x, word.size());
    if (it != word) continue;
    DesignedPoint p;
    p.x_double = x.to_double();
    p.x = std::move(x);
    p.itinerary = std::move(it);
    p.log2_width = width.log2_abs();
    p.precision = bits;
    p.complete = true;
    return p;
  }
  throw Error(ErrorKind::precision_exhausted,
              "designed itinerary of length " + std::to_string(word.size()) + " could not be confirmed");
}

inline DesignedPoint design_point(const IntervalMap& map, const BlockSchedule& sched, const DesignOptions& opt = {}) {
  return design_point(map, sched.symbols(), opt);
}

/// The extended-precision orbit of a designed point, reduced to doubles.
struct HighOrbit {
  std::vector<double> terms;           // log|Df(y_i)|
  std::vector<double> points;          // y_i rounded
  std::vector<double> log2_dist_crit;  // log2|y_i - c|
};

inline HighOrbit trace_designed(const IntervalMap& map, const DesignedPoint& pt, std::size_t n) {
  PrecisionScope scope(pt.precision);
  HighOrbit out;
  out.terms.reserve(n);
  out.points.reserve(n);
  out.log2_dist_crit.reserve(n);
  const double c = map.critical_point();
  BigFloat y = pt.x;
  for (std::size_t i = 0; i < n; ++i) {
    out.points.push_back(y.to_double());
    out.log2_dist_crit.push_back((y - c).log2_abs());
    out.terms.push_back(log_abs_derivative(map, y, i));
    if (i + 1 < n) y = step(map, y, i + 1);
  }
  return out;
}

/// Λ_n of a designed point at `checkpoints`, high fidelity only.
inline LyapunovProfile profile_designed(const IntervalMap& map, const DesignedPoint& pt,
                                        std::vector<std::size_t> checkpoints) {
  const std::size_t N = pt.itinerary.size();
  return profile_from_terms(trace_designed(map, pt, N).terms, N, std::move(checkpoints));
}

struct StageReport {
  std::size_t n = 0;
  double lambda_f_dip = 0.0;       // Λ_{1+n} for f
  double lambda_f_recovery = 0.0;  // Λ_{floor(2.1 n)} for f
  double lambda_g_dip = 0.0;
  double lambda_g_recovery = 0.0;
  double log2_dist_crit = 0.0;     // log2|c - y_n| for f
  double fitted_exponent = 0.0;    // log2|c - y_n| / n, compare with -(total_factor - 1)
  /// Λ_{1+n} predicted by summing the schedule's block rates with the
  /// stage exponent read as n (corrected) or as n_1 (literal).
  double predicted_dip_corrected = 0.0;
  double predicted_dip_literal = 0.0;
  double predicted_recovery_corrected = 0.0;
  double predicted_recovery_literal = 0.0;
};

struct CounterexampleReport {
  std::size_t n1 = 0;
  std::size_t depth = 0;
  std::size_t length = 0;
  std::string map_f;
  std::string map_g;
  std::vector<std::size_t> checkpoints;
  LyapunovProfile profile_f;
  LyapunovProfile profile_g;
  std::vector<StageReport> stages;
  /// Minimum of Λ over the checkpoints, the finite-depth liminf proxy.
  double lambda_minus_f = 0.0;
  double lambda_minus_g = 0.0;
  int sign_f = 0;
  int sign_g = 0;
  /// |Dg(p~)| at the fixed point of g with itinerary R^∞, and log(α/π^{(tf-1)/2}).
  double alpha = 0.0;
  double predicted_g_rate = 0.0;
  /// Smallest, over periods q <= 32, of max |y_{i+q} - y_i| on the last stage.
  double min_return_gap = 0.0;
  bool asymptotically_periodic = false;
  /// |h(y) - y~| with h the depth-48 itinerary conjugacy evaluated at double y.
  double conjugacy_crosscheck = 0.0;
  mpfr_prec_t precision_f = 0;
  mpfr_prec_t precision_g = 0;
  /// Set when the run reached fewer stages than requested.
  std::size_t achieved_depth = 0;
};

namespace detail {
inline double fixed_point_right(const IntervalMap& g) {
  // R^∞ point: iterate the right inverse branch, which contracts onto it.
  double p = 0.75;
  for (int i = 0; i < 200; ++i) p = g.inverse(1, p);
  return p;
}

inline double min_return_gap(const std::vector<double>& pts, std::size_t from, std::size_t max_q = 32) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t q = 1; q <= max_q; ++q) {
    double worst = 0.0;
    for (std::size_t i = from; i + q < pts.size(); ++i) worst = std::max(worst, std::fabs(pts[i + q] - pts[i]));
    best = std::min(best, worst);
  }
  return best;
}
}  // namespace detail

/// Designs y for f along the counterexample schedule, transfers it to g by
/// designing the point of g with the same itinerary, and profiles both.
inline CounterexampleReport counterexample_experiment(std::size_t n1, std::size_t depth,
                                                      const IntervalMap& f = IntervalMap(Family::logistic, 4.0),
                                                      const IntervalMap& g = IntervalMap(Family::sine, 1.0),
                                                      std::size_t growth = 10, double total_factor = 2.1) {
  if (n1 < 100) throw Error(ErrorKind::invalid_argument, "counterexample needs n1 >= 100");
  const BlockSchedule sched = BlockSchedule::counterexample(n1, depth, growth, total_factor);
  const std::vector<Symbol> word = sched.symbols();

  CounterexampleReport rep;
  rep.n1 = n1;
  rep.depth = depth;
  rep.length = word.size();
  rep.map_f = f.name();
  rep.map_g = g.name();
  rep.checkpoints = sched.checkpoints();

  auto run = [&word, &rep](const IntervalMap& m) {
    DesignedPoint pt = design_point(m, word);
    HighOrbit orbit = trace_designed(m, pt, word.size());
    LyapunovProfile prof = profile_from_terms(orbit.terms, word.size(), rep.checkpoints);
    return std::make_tuple(std::move(pt), std::move(orbit), std::move(prof));
  };
  auto fut_g = std::async(std::launch::async, run, std::cref(g));
  auto [pt_f, orbit_f, prof_f] = run(f);
  auto [pt_g, orbit_g, prof_g] = fut_g.get();
  rep.profile_f = std::move(prof_f);
  rep.profile_g = std::move(prof_g);
  rep.precision_f = pt_f.precision;
  rep.precision_g = pt_g.precision;
  rep.achieved_depth = depth;

  const double p_tilde = detail::fixed_point_right(g);
  rep.alpha = std::fabs(g.derivative(p_tilde));
  rep.predicted_g_rate = std::log(rep.alpha / std::pow(std::numbers::pi, (total_factor - 1.0) / 2.0));

  const double rate = std::log(2.0);
  const double over = total_factor - 1.0;
  rep.lambda_minus_f = std::numeric_limits<double>::infinity();
  rep.lambda_minus_g = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sched.stages().size(); ++k) {
    const std::size_t n = sched.stages()[k];
    const auto end = static_cast<std::size_t>(std::floor(total_factor * static_cast<double>(n)));
    StageReport s;
    s.n = n;
    s.lambda_f_dip = *rep.profile_f.at(n + 1);
    s.lambda_f_recovery = *rep.profile_f.at(end);
    s.lambda_g_dip = *rep.profile_g.at(n + 1);
    s.lambda_g_recovery = *rep.profile_g.at(end);
    s.log2_dist_crit = orbit_f.log2_dist_crit[n];
    s.fitted_exponent = s.log2_dist_crit / static_cast<double>(n);
    const double n_d = static_cast<double>(n);
    const double n1_d = static_cast<double>(n1);
    s.predicted_dip_corrected = (n_d - over * n_d) * rate / (n_d + 1.0);
    s.predicted_dip_literal = (n1_d - over * n_d) * rate / (n_d + 1.0);
    s.predicted_recovery_corrected = rate;
    s.predicted_recovery_literal = total_factor * n1_d * rate / static_cast<double>(end);
    rep.stages.push_back(s);
  }
  for (const auto& [n, v] : rep.profile_f.checkpoints) rep.lambda_minus_f = std::min(rep.lambda_minus_f, v);
  for (const auto& [n, v] : rep.profile_g.checkpoints) rep.lambda_minus_g = std::min(rep.lambda_minus_g, v);
  rep.sign_f = (rep.lambda_minus_f > 0.0) - (rep.lambda_minus_f < 0.0);
  rep.sign_g = (rep.lambda_minus_g > 0.0) - (rep.lambda_minus_g < 0.0);

  const std::size_t last_start = sched.stages().size() > 1 ? sched.stages()[sched.stages().size() - 2] : 0;
  rep.min_return_gap = detail::min_return_gap(orbit_f.points, last_start);
  rep.asymptotically_periodic = rep.min_return_gap < 1e-3;

  if (f.is_unimodal() && g.is_unimodal()) {
    try {
      const ConjugacyMap h = make_conjugacy(f, g, ConjugacyMode::itinerary, 48);
      rep.conjugacy_crosscheck = std::fabs(h(pt_f.x_double) - pt_g.x_double);
    } catch (const Error&) {
      rep.conjugacy_crosscheck = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return rep;
}

}  // namespace ldyn

#endif  // LDYN_ORBIT_DESIGN_HPP
