#ifndef LDYN_CONJUGACY_HPP
#define LDYN_CONJUGACY_HPP

// Topological conjugacies between kneading-equivalent unimodal maps:
// closed form where one is known, nested-cylinder transfer otherwise.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ldyn/error.hpp"
#include "ldyn/interval_map.hpp"
#include "ldyn/lyapunov.hpp"
#include "ldyn/symbolic.hpp"

namespace ldyn {

enum class ConjugacyMode { explicit_formula, itinerary };

inline std::string_view to_string(ConjugacyMode m) {
  return m == ConjugacyMode::explicit_formula ? "explicit" : "itinerary";
}

struct ConjugacyValue {
  double value = 0.0;
  /// Width of the target cylinder the value was taken from (0 for closed forms and exact hits).
  double width = 0.0;
  std::size_t depth = 0;
};

class ConjugacyMap {
 public:
  ConjugacyMap(IntervalMap f, IntervalMap g, ConjugacyMode mode, std::size_t depth)
      : f_(std::move(f)), g_(std::move(g)), mode_(mode), depth_(depth) {}

  [[nodiscard]] const IntervalMap& source() const { return f_; }
  [[nodiscard]] const IntervalMap& target() const { return g_; }
  [[nodiscard]] ConjugacyMode mode() const { return mode_; }
  [[nodiscard]] std::size_t depth() const { return depth_; }
  /// Residual bound |h∘f - g∘h| the construction is held to.
  [[nodiscard]] double tolerance() const { return mode_ == ConjugacyMode::explicit_formula ? 1e-9 : 1e-6; }

  [[nodiscard]] ConjugacyValue evaluate(double x) const {
    if (mode_ == ConjugacyMode::explicit_formula) return {explicit_value(x), 0.0, 0};
    return transfer(itinerary_symbols(f_, x, depth_));
  }

  double operator()(double x) const { return evaluate(x).value; }

  /// The point of g whose itinerary matches `word`. A critical symbol at
  /// position j pins the point to the g-preimage of c along w[0..j-1].
  [[nodiscard]] ConjugacyValue transfer(const std::vector<Symbol>& word) const {
    std::size_t crit_at = word.size();
    for (std::size_t j = 0; j < word.size(); ++j)
      if (word[j].critical) {
        crit_at = j;
        break;
      }
    if (crit_at < word.size()) {
      double y = g_.critical_points().at(static_cast<std::size_t>(word[crit_at].index)).location;
      for (std::size_t j = crit_at; j-- > 0;) y = g_.inverse(static_cast<std::size_t>(word[j].index), y);
      return {y, 0.0, crit_at + 1};
    }
    // Rounding can empty a long cylinder; drop trailing symbols until it is realised.
    for (std::size_t len = word.size(); len > 0; --len) {
      const std::vector<Symbol> prefix(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(len));
      if (auto cyl = cylinder(g_, prefix)) return {cyl->mid(), cyl->width(), len};
    }
    return {g_.domain().mid(), g_.domain().width(), 0};
  }

 private:
  [[nodiscard]] double explicit_value(double x) const {
    if (f_.family() == Family::tent && g_.family() == Family::logistic) {
      const double s = std::sin(std::numbers::pi * x / 2.0);
      return s * s;
    }
    return 2.0 / std::numbers::pi * std::asin(std::sqrt(x));
  }

  IntervalMap f_;
  IntervalMap g_;
  ConjugacyMode mode_;
  std::size_t depth_;
};

/// Kneading sequence: itinerary of the critical value, length M.
inline std::vector<Symbol> kneading_sequence(const IntervalMap& map, std::size_t M) {
  return itinerary_symbols(map, map(map.critical_point()), M);
}

inline bool explicit_pair_available(const IntervalMap& f, const IntervalMap& g) {
  const bool tent2 = f.family() == Family::tent && f.param() == 2.0;
  const bool log4 = g.family() == Family::logistic && g.param() == 4.0;
  const bool log4_src = f.family() == Family::logistic && f.param() == 4.0;
  const bool tent2_dst = g.family() == Family::tent && g.param() == 2.0;
  return (tent2 && log4) || (log4_src && tent2_dst);
}

/// Checks kneading agreement to depth M, then builds h with h∘f = g∘h.
inline ConjugacyMap make_conjugacy(const IntervalMap& f, const IntervalMap& g, ConjugacyMode mode,
                                   std::size_t M = 48) {
  if (!f.is_unimodal() || !g.is_unimodal()) throw Error(ErrorKind::not_unimodal, "conjugacy needs unimodal maps");
  if (kneading_sequence(f, M) != kneading_sequence(g, M))
    throw Error(ErrorKind::kneading_mismatch, f.name() + " and " + g.name() + " differ in kneading before depth " +
                                                  std::to_string(M));
  if (mode == ConjugacyMode::explicit_formula && !explicit_pair_available(f, g))
    throw Error(ErrorKind::invalid_argument, "no closed-form conjugacy known for " + f.name() + " -> " + g.name());
  return ConjugacyMap(f, g, mode, M);
}

/// Pushforward: same weights, points mapped through h.
inline EmpiricalMeasure transport_measure(const ConjugacyMap& h, const EmpiricalMeasure& mu) {
  EmpiricalMeasure out;
  out.points.reserve(mu.size());
  for (double x : mu.points) out.points.push_back(h(x));
  out.weights = mu.weights;
  out.source = "pushforward of (" + mu.source + ") to " + h.target().name();
  return out;
}

struct SignInvarianceOptions {
  std::size_t burn_in = 1000;
  std::uint64_t seed = 1;
  double low_confidence_band = 0.02;
};

struct SignInvarianceReport {
  double lambda_f = 0.0;
  double lambda_g = 0.0;
  bool signs_agree = false;
  bool low_confidence = false;
  /// The sampled measure of f collapsed onto an attracting cycle.
  bool atomic = false;
  std::size_t cycle_period = 0;
  bool reliable = true;
};

/// Estimates λ(μ_f) from a typical orbit, transports the empirical measure
/// through h and evaluates λ(μ_g). When μ_f is carried by an attracting
/// cycle, μ_g is the Dirac measure on g's cycle of the same itinerary.
inline SignInvarianceReport sign_invariance_experiment(const ConjugacyMap& h, std::size_t n_samples,
                                                       const SignInvarianceOptions& opt = {}) {
  const IntervalMap& f = h.source();
  const IntervalMap& g = h.target();
  std::mt19937_64 rng(opt.seed);
  const double x0 = unit_uniform(rng);
  const EmpiricalMeasure mu_f = EmpiricalMeasure::orbit(f, x0, n_samples, opt.burn_in);
  const MeasureExponent lf = measure_exponent(f, mu_f);

  SignInvarianceReport rep;
  rep.lambda_f = lf.value;
  rep.reliable = lf.reliable;
  const auto cyc_f = lf.value < 0.0 ? detect_attracting_cycle(f, mu_f.points.back()) : std::nullopt;
  if (cyc_f) {
    rep.atomic = true;
    rep.cycle_period = cyc_f->period;
    double y = h(mu_f.points.back());
    for (std::size_t i = 0; i < opt.burn_in; ++i) y = step(g, y);
    const auto cyc_g = detect_attracting_cycle(g, y);
    if (!cyc_g || cyc_g->period != cyc_f->period)
      throw Error(ErrorKind::kneading_mismatch, "target map has no attracting cycle of matching period");
    rep.lambda_f = measure_exponent(f, cycle_measure(*cyc_f)).value;
    const MeasureExponent lg = measure_exponent(g, cycle_measure(*cyc_g));
    rep.lambda_g = lg.value;
    rep.reliable = rep.reliable && lg.reliable;
  } else {
    const MeasureExponent lg = measure_exponent(g, transport_measure(h, mu_f));
    rep.lambda_g = lg.value;
    rep.reliable = rep.reliable && lg.reliable;
  }
  auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
  rep.signs_agree = sgn(rep.lambda_f) == sgn(rep.lambda_g);
  rep.low_confidence = std::fabs(rep.lambda_f) < opt.low_confidence_band || std::fabs(rep.lambda_g) < opt.low_confidence_band;
  return rep;
}

}  // namespace ldyn

#endif  // LDYN_CONJUGACY_HPP
