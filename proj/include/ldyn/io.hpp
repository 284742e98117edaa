#ifndef LDYN_IO_HPP
#define LDYN_IO_HPP

// Serialisation: JSON for maps, kneading data, towers and reports; DOT for
// towers; CSV for exponent profiles.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldyn/conjugacy.hpp"
#include "ldyn/hofbauer.hpp"
#include "ldyn/induced.hpp"
#include "ldyn/interval_map.hpp"
#include "ldyn/lyapunov.hpp"
#include "ldyn/orbit_design.hpp"
#include "ldyn/symbolic.hpp"

namespace ldyn {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form is not portable across libcs; fix 17 digits.
inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON has no infinities; non-finite numbers become null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const IntervalMap& m) {
  json j{{"family", std::string(to_string(m.family()))}};
  j["param"] = m.family() == Family::sine ? json(nullptr) : json(m.param());
  return j;
}

inline IntervalMap map_from_json(const json& j) {
  const std::string fam = j.at("family").get<std::string>();
  if (!j.contains("param") || j.at("param").is_null()) return make_family(fam);
  return make_family(fam, j.at("param").get<double>());
}

inline json to_json(const KneadingData& k) {
  json j{{"S", k.S}, {"z", k.z}, {"zhat", k.zhat}, {"truncated", k.truncated}};
  if (k.truncated) j["truncation_reason"] = k.truncation_reason;
  return j;
}

inline json to_json(const Tower& t) {
  json nodes = json::array();
  for (const TowerNode& n : t.nodes()) {
    json prov = json::array();
    for (const Provenance& p : n.prov) prov.push_back({{"point", p.point}, {"iterate", p.iterate}});
    nodes.push_back({{"id", n.id}, {"lo", n.interval.lo}, {"hi", n.interval.hi}, {"depth", n.depth}, {"prov", prov}});
  }
  json edges = json::array();
  for (const TowerEdge& e : t.edges()) edges.push_back({{"from", e.from}, {"branch", e.branch}, {"to", e.to}});
  return {{"nodes", nodes}, {"edges", edges}, {"base", t.base()}, {"partial", t.partial()},
          {"depth_cap", t.depth_cap()}};
}

inline void write_dot(std::ostream& os, const Tower& t) {
  os << "digraph tower {\n";
  for (const TowerNode& n : t.nodes())
    os << "  n" << n.id << " [label=\"[" << fmt17(n.interval.lo) << ", " << fmt17(n.interval.hi) << "] @" << n.depth
       << "\"];\n";
  for (const TowerEdge& e : t.edges()) os << "  n" << e.from << " -> n" << e.to << " [label=\"" << e.branch << "\"];\n";
  os << "}\n";
}

/// Leading "# key=value" lines carrying the resolved configuration.
inline void write_csv_config(std::ostream& os, const json& config) {
  for (const auto& [key, value] : config.items()) os << "# " << key << '=' << value.dump() << '\n';
}

inline void write_profile_csv(std::ostream& os, const LyapunovProfile& p, const json& config) {
  write_csv_config(os, config);
  os << "n,lambda_n\n";
  for (const auto& [n, v] : p.checkpoints) os << n << ',' << fmt17(v) << '\n';
}

/// Long format with one row per (map, checkpoint).
inline void write_profiles_csv(std::ostream& os, const std::vector<std::pair<std::string, LyapunovProfile>>& profiles,
                               const json& config) {
  write_csv_config(os, config);
  os << "n,lambda_n,map\n";
  for (const auto& [name, p] : profiles)
    for (const auto& [n, v] : p.checkpoints) os << n << ',' << fmt17(v) << ',' << name << '\n';
}

inline json to_json(const LyapunovProfile& p) {
  json cps = json::array();
  for (const auto& [n, v] : p.checkpoints) cps.push_back({{"n", n}, {"lambda", num(v)}});
  return {{"N", p.N},
          {"checkpoints", cps},
          {"tail_begin", p.tail_begin},
          {"tail_stride", p.tail_stride},
          {"lambda_minus_est", num(p.lambda_minus_est)},
          {"lambda_plus_est", num(p.lambda_plus_est)}};
}

inline json to_json(const ScanEntry& e) {
  json j{{"param", e.param}, {"trial", e.trial},   {"seed", e.seed},
         {"x0", e.x0},       {"lambda", num(e.lambda)}, {"period", e.period},
         {"multiplier", num(e.multiplier)}, {"violation", e.violation}};
  if (!e.error.empty()) j["error"] = e.error;
  return j;
}

inline json to_json(const SignInvarianceReport& r) {
  return {{"lambda_f", num(r.lambda_f)},   {"lambda_g", num(r.lambda_g)},  {"signs_agree", r.signs_agree},
          {"low_confidence", r.low_confidence}, {"atomic", r.atomic}, {"cycle_period", r.cycle_period},
          {"reliable", r.reliable}};
}

inline json to_json(const CounterexampleReport& r) {
  json stages = json::array();
  for (const StageReport& s : r.stages)
    stages.push_back({{"n", s.n},
                      {"lambda_f_dip", s.lambda_f_dip},
                      {"lambda_f_recovery", s.lambda_f_recovery},
                      {"lambda_g_dip", s.lambda_g_dip},
                      {"lambda_g_recovery", s.lambda_g_recovery},
                      {"log2_dist_crit", s.log2_dist_crit},
                      {"fitted_exponent", s.fitted_exponent},
                      {"predicted_dip_corrected", s.predicted_dip_corrected},
                      {"predicted_dip_literal", s.predicted_dip_literal},
                      {"predicted_recovery_corrected", s.predicted_recovery_corrected},
                      {"predicted_recovery_literal", s.predicted_recovery_literal}});
  return {{"n1", r.n1},
          {"depth", r.depth},
          {"achieved_depth", r.achieved_depth},
          {"length", r.length},
          {"map_f", r.map_f},
          {"map_g", r.map_g},
          {"checkpoints", r.checkpoints},
          {"stages", stages},
          {"lambda_minus_f", r.lambda_minus_f},
          {"lambda_minus_g", r.lambda_minus_g},
          {"sign_f", r.sign_f},
          {"sign_g", r.sign_g},
          {"alpha", r.alpha},
          {"predicted_g_rate", r.predicted_g_rate},
          {"min_return_gap", r.min_return_gap},
          {"asymptotically_periodic", r.asymptotically_periodic},
          {"conjugacy_crosscheck", num(r.conjugacy_crosscheck)},
          {"precision_bits_f", r.precision_f},
          {"precision_bits_g", r.precision_g},
          {"finite_depth_evidence", true}};
}

inline json to_json(const InducedMap& im) {
  json branches = json::array();
  for (const InducedBranch& b : im.branches) {
    json j{{"k", b.k},
           {"S", b.S},
           {"U", {b.U.lo, b.U.hi}},
           {"U_hat", {b.U_hat.lo, b.U_hat.hi}},
           {"image", {b.image.lo, b.image.hi}},
           {"image_hat", {b.image_hat.lo, b.image_hat.hi}},
           {"critical_residual", b.critical_residual},
           {"monotone", b.monotone},
           {"image_touches_c", b.image_touches_c},
           {"image_class", std::string(to_string(b.image_class))},
           {"distortion", num(b.distortion)},
           {"distortion_extended", b.distortion_extended ? num(*b.distortion_extended) : json(nullptr)},
           {"gap_c", b.gap_c},
           {"gap_inner", b.gap_inner},
           {"gap_outer", b.gap_outer ? json(*b.gap_outer) : json(nullptr)}};
    branches.push_back(std::move(j));
  }
  json p3 = json::array();
  for (double v : im.property3) p3.push_back(num(v));
  return {{"map", to_json(im.map)},        {"kneading", to_json(im.kneading)}, {"branches", branches},
          {"property1", im.property1},     {"property3", p3},                 {"truncated", im.truncated}};
}

}  // namespace ldyn

#endif  // LDYN_IO_HPP
