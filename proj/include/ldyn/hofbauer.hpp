#ifndef LDYN_HOFBAUER_HPP
#define LDYN_HOFBAUER_HPP

// Canonical Markov extension (Hofbauer tower): breadth-first construction
// from the base, lifting of orbits, mass profiles on the compact parts K_N,
// node-cycle detection and first-return branches to a subinterval of a node.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ldyn/error.hpp"
#include "ldyn/interval.hpp"
#include "ldyn/interval_map.hpp"

namespace ldyn {

/// Endpoint provenance: the endpoint equals f^iterate(special point).
/// Special points are numbered 0 = left domain end, 1 = right domain end,
/// 2 + i = critical point i. Iterate 0 of a domain end is a base boundary.
struct Provenance {
  std::uint32_t point = 0;
  std::uint32_t iterate = 0;

  [[nodiscard]] bool base_boundary() const { return point < 2 && iterate == 0; }
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct TowerNode {
  std::size_t id = 0;
  Interval interval;
  std::size_t depth = 0;
  std::array<Provenance, 2> prov{};
};

struct TowerEdge {
  std::size_t from = 0;
  std::size_t branch = 0;
  std::size_t to = 0;
};

struct TowerOptions {
  std::size_t depth_cap = 10;
  std::size_t node_limit = 100000;
  double eps_id = 1e-10;
  /// Expand branches in reverse order (used to check order independence).
  bool reverse_branch_order = false;
};

class Tower {
 public:
  [[nodiscard]] const std::vector<TowerNode>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<TowerEdge>& edges() const { return edges_; }
  [[nodiscard]] std::size_t base() const { return 0; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] const TowerNode& node(std::size_t id) const { return nodes_.at(id); }
  [[nodiscard]] std::size_t depth_cap() const { return options_.depth_cap; }
  [[nodiscard]] const TowerOptions& options() const { return options_; }
  /// True when construction hit the node limit.
  [[nodiscard]] bool partial() const { return partial_; }
  [[nodiscard]] bool is_frontier(std::size_t id) const { return nodes_.at(id).depth >= options_.depth_cap; }

  [[nodiscard]] std::optional<std::size_t> target(std::size_t id, std::size_t branch) const {
    const auto& row = adjacency_.at(id);
    if (branch >= row.size()) return std::nullopt;
    return row[branch];
  }

  /// Value of f^iterate(special point) as used for endpoints.
  [[nodiscard]] double provenance_value(const Provenance& p) const {
    const auto& orbit = special_orbits_.at(p.point);
    return p.iterate < orbit.size() ? orbit[p.iterate] : std::numeric_limits<double>::quiet_NaN();
  }

 private:
  friend Tower build_tower(const IntervalMap& map, const TowerOptions& opt);

  TowerOptions options_;
  std::vector<TowerNode> nodes_;
  std::vector<TowerEdge> edges_;
  std::vector<std::vector<std::optional<std::size_t>>> adjacency_;
  std::vector<std::vector<double>> special_orbits_;
  bool partial_ = false;
};

namespace detail {
struct ProvKey {
  std::uint64_t lo;
  std::uint64_t hi;
  friend bool operator==(const ProvKey&, const ProvKey&) = default;
};
struct ProvKeyHash {
  std::size_t operator()(const ProvKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.lo * 0x9E3779B97F4A7C15ULL ^ k.hi);
  }
};
inline std::uint64_t pack(const Provenance& p) { return (std::uint64_t{p.point} << 32) | p.iterate; }
}  // namespace detail

/// Breadth-first construction up to `depth_cap`. A new image interval is
/// identified with an existing node when its endpoint provenances coincide
/// or both endpoints agree within `eps_id`.
inline Tower build_tower(const IntervalMap& map, const TowerOptions& opt = {}) {
  Tower t;
  t.options_ = opt;
  const Interval dom = map.domain();
  const std::size_t nb = map.branch_count();

  // Orbits of the special points, extended lazily.
  t.special_orbits_.push_back({dom.lo});
  t.special_orbits_.push_back({dom.hi});
  for (const auto& cp : map.critical_points()) t.special_orbits_.push_back({cp.location});
  auto value = [&t, &map](const Provenance& p) {
    auto& orbit = t.special_orbits_[p.point];
    while (orbit.size() <= p.iterate) orbit.push_back(step(map, orbit.back(), orbit.size()));
    return orbit[p.iterate];
  };
  // Branch boundaries as provenance-tagged special points.
  auto boundary_tag = [&map](double x) -> std::optional<Provenance> {
    if (x == map.domain().lo) return Provenance{0, 0};
    if (x == map.domain().hi) return Provenance{1, 0};
    const auto& cps = map.critical_points();
    for (std::size_t i = 0; i < cps.size(); ++i)
      if (x == cps[i].location) return Provenance{static_cast<std::uint32_t>(2 + i), 0};
    return std::nullopt;
  };

  std::unordered_map<detail::ProvKey, std::size_t, detail::ProvKeyHash> by_prov;
  std::multimap<double, std::size_t> by_lo;

  auto find_node = [&](const Interval& iv, const std::array<Provenance, 2>& prov) -> std::optional<std::size_t> {
    if (auto it = by_prov.find({detail::pack(prov[0]), detail::pack(prov[1])}); it != by_prov.end())
      return it->second;
    for (auto it = by_lo.lower_bound(iv.lo - opt.eps_id); it != by_lo.end() && it->first <= iv.lo + opt.eps_id; ++it) {
      const Interval& other = t.nodes_[it->second].interval;
      if (std::fabs(other.hi - iv.hi) <= opt.eps_id) return it->second;
    }
    return std::nullopt;
  };
  auto add_node = [&](const Interval& iv, std::size_t depth, const std::array<Provenance, 2>& prov) {
    const std::size_t id = t.nodes_.size();
    t.nodes_.push_back({id, iv, depth, prov});
    t.adjacency_.emplace_back(nb);
    by_prov.emplace(detail::ProvKey{detail::pack(prov[0]), detail::pack(prov[1])}, id);
    by_lo.emplace(iv.lo, id);
    return id;
  };

  add_node(dom, 0, {Provenance{0, 0}, Provenance{1, 0}});
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t id = queue.front();
    queue.pop_front();
    if (t.nodes_[id].depth >= opt.depth_cap) continue;
    for (std::size_t k = 0; k < nb; ++k) {
      const std::size_t b = opt.reverse_branch_order ? nb - 1 - k : k;
      const TowerNode d = t.nodes_[id];
      const Interval& xi = map.branches()[b].domain;
      const double lo = std::max(d.interval.lo, xi.lo);
      const double hi = std::min(d.interval.hi, xi.hi);
      if (!(lo < hi)) continue;
      // Clipped endpoints keep the node's provenance unless the cut is a branch boundary.
      Provenance plo = lo == d.interval.lo ? d.prov[0] : *boundary_tag(xi.lo);
      Provenance phi = hi == d.interval.hi ? d.prov[1] : *boundary_tag(xi.hi);
      ++plo.iterate;
      ++phi.iterate;
      double vlo = value(plo);
      double vhi = value(phi);
      if (map.branches()[b].orientation == Orientation::decreasing) {
        std::swap(vlo, vhi);
        std::swap(plo, phi);
      }
      if (!(vlo < vhi)) continue;
      const Interval e{vlo, vhi};
      const std::array<Provenance, 2> prov{plo, phi};
      std::size_t to = 0;
      if (auto existing = find_node(e, prov)) {
        to = *existing;
      } else {
        if (t.nodes_.size() >= opt.node_limit) {
          t.partial_ = true;
          return t;
        }
        to = add_node(e, d.depth + 1, prov);
        queue.push_back(to);
      }
      t.adjacency_[id][b] = to;
      t.edges_.push_back({id, b, to});
    }
  }
  return t;
}

/// Result of the Markov-closure and provenance checks.
struct MarkovReport {
  std::size_t checked_edges = 0;
  std::size_t missing_edges = 0;
  double max_edge_residual = 0.0;
  double max_provenance_residual = 0.0;
  [[nodiscard]] bool ok(double tol = 1e-9) const {
    return missing_edges == 0 && max_edge_residual < tol && max_provenance_residual < tol;
  }
};

/// For every non-frontier node D and branch with D ∩ ξ_i of positive length,
/// the edge target must exist and equal closure(f(D ∩ ξ_i)).
inline MarkovReport check_markov(const Tower& tower, const IntervalMap& map) {
  MarkovReport rep;
  for (const TowerNode& d : tower.nodes()) {
    for (int e = 0; e < 2; ++e) {
      const Provenance& p = d.prov[static_cast<std::size_t>(e)];
      double direct = p.point < 2 ? (p.point == 0 ? map.domain().lo : map.domain().hi)
                                  : map.critical_points()[p.point - 2].location;
      for (std::uint32_t j = 0; j < p.iterate; ++j) direct = step(map, direct);
      const double v = e == 0 ? d.interval.lo : d.interval.hi;
      rep.max_provenance_residual = std::max(rep.max_provenance_residual, std::fabs(direct - v));
    }
    if (tower.is_frontier(d.id)) continue;
    for (std::size_t b = 0; b < map.branch_count(); ++b) {
      const Interval& xi = map.branches()[b].domain;
      const double lo = std::max(d.interval.lo, xi.lo);
      const double hi = std::min(d.interval.hi, xi.hi);
      if (!(lo < hi)) continue;
      ++rep.checked_edges;
      const Interval img = Interval::hull(map.eval(b, lo), map.eval(b, hi));
      const auto to = tower.target(d.id, b);
      if (!to) {
        ++rep.missing_edges;
        continue;
      }
      const Interval& got = tower.node(*to).interval;
      rep.max_edge_residual =
          std::max({rep.max_edge_residual, std::fabs(got.lo - img.lo), std::fabs(got.hi - img.hi)});
    }
  }
  return rep;
}

struct TowerPoint {
  double x = 0.0;
  std::size_t node = 0;
};

struct Lift {
  std::vector<TowerPoint> points;
  bool truncated = false;
  std::string reason;
};

/// Lifts the orbit of x starting on the base. The projection of the lift is
/// exactly eval_orbit(map, x, points.size() - 1).
inline Lift lift_orbit(const Tower& tower, const IntervalMap& map, double x, std::size_t n) {
  Lift lift;
  lift.points.reserve(n + 1);
  if (!map.domain().contains(x)) throw Error(ErrorKind::domain_escape, "start point outside the domain", 0);
  std::size_t node = tower.base();
  lift.points.push_back({x, node});
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = map.branch_of(x);
    if (!b) {
      lift.truncated = true;
      lift.reason = "critical hit at step " + std::to_string(i);
      break;
    }
    const auto to = tower.target(node, *b);
    if (!to) {
      lift.truncated = true;
      lift.reason = tower.is_frontier(node) ? "crossed the depth cap at step " + std::to_string(i)
                                            : "no edge for branch at step " + std::to_string(i);
      break;
    }
    x = step(map, x, i + 1);
    node = *to;
    lift.points.push_back({x, node});
  }
  return lift;
}

struct MassProfile {
  /// m[j] = fraction of lift times 0..j spent in K_N.
  std::vector<double> m;
  bool truncated = false;
};

inline MassProfile mass_profile(const Tower& tower, const IntervalMap& map, double x, std::size_t n, std::size_t N) {
  const Lift lift = lift_orbit(tower, map, x, n);
  MassProfile prof;
  prof.truncated = lift.truncated;
  prof.m.reserve(lift.points.size());
  std::size_t inside = 0;
  for (std::size_t j = 0; j < lift.points.size(); ++j) {
    if (tower.node(lift.points[j].node).depth <= N) ++inside;
    prof.m.push_back(static_cast<double>(inside) / static_cast<double>(j + 1));
  }
  return prof;
}

struct NodeCycle {
  std::size_t start = 0;
  std::size_t period = 0;
  std::vector<std::size_t> nodes;
  std::size_t max_depth = 0;
};

/// Earliest eventually-periodic stretch of the node sequence: period q
/// repeated at least `min_repeats` times.
inline std::optional<NodeCycle> detect_node_cycle(const Tower& tower, const Lift& lift, std::size_t max_period = 64,
                                                  std::size_t min_repeats = 4) {
  const auto& pts = lift.points;
  for (std::size_t start = 0; start < pts.size(); ++start) {
    for (std::size_t q = 1; q <= max_period; ++q) {
      const std::size_t span = q * min_repeats;
      if (start + span > pts.size()) break;
      bool periodic = true;
      for (std::size_t i = start + q; i < start + span && periodic; ++i) periodic = pts[i].node == pts[i - q].node;
      if (!periodic) continue;
      NodeCycle cyc{start, q, {}, 0};
      for (std::size_t i = 0; i < q; ++i) {
        cyc.nodes.push_back(pts[start + i].node);
        cyc.max_depth = std::max(cyc.max_depth, tower.node(pts[start + i].node).depth);
      }
      return cyc;
    }
  }
  return std::nullopt;
}

struct ReturnBranch {
  Interval domain;
  std::size_t time = 0;
  /// Minimum of |Df^time| over a grid on the branch domain.
  double min_multiplier = 0.0;
  /// The branch image (before restricting to J) covers J.
  bool onto = false;
  std::vector<std::uint8_t> path;
};

struct FirstReturn {
  std::vector<ReturnBranch> branches;
  std::size_t escaped_pieces = 0;
  bool budget_exhausted = false;
};

struct FirstReturnOptions {
  std::size_t n_max = 20;
  std::size_t piece_budget = 1'000'000;
  std::size_t grid = 33;
  double min_width = 1e-15;
};

/// Discovers the branches of the first-return map of the lifted dynamics to
/// J (a subinterval of node `node_id`) by pushing J forward along tower paths
/// until pieces land back in the same node over J.
inline FirstReturn first_return(const Tower& tower, const IntervalMap& map, std::size_t node_id, const Interval& J,
                                const FirstReturnOptions& opt = {}) {
  if (!tower.node(node_id).interval.contains(J))
    throw Error(ErrorKind::invalid_argument, "J must lie inside the chosen tower node");
  struct Piece {
    Interval image;
    std::size_t node;
    std::vector<std::uint8_t> path;
  };
  FirstReturn out;
  std::deque<Piece> live{{J, node_id, {}}};
  std::size_t processed = 0;

  auto pull_back_path = [&map](Interval iv, const std::vector<std::uint8_t>& path) {
    for (std::size_t k = path.size(); k-- > 0;) iv = pullback(map, path[k], iv);
    return iv;
  };
  auto min_multiplier = [&map, &opt](const Interval& dom, std::size_t s) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < opt.grid; ++g) {
      double x = dom.lo + (dom.hi - dom.lo) * (static_cast<double>(g) + 0.5) / static_cast<double>(opt.grid);
      double logd = 0.0;
      for (std::size_t i = 0; i < s; ++i) {
        logd += std::log(std::fabs(map.derivative(x)));
        x = step(map, x);
      }
      best = std::min(best, std::exp(logd));
    }
    return best;
  };

  while (!live.empty()) {
    if (++processed > opt.piece_budget) {
      out.budget_exhausted = true;
      break;
    }
    Piece piece = std::move(live.front());
    live.pop_front();
    if (piece.path.size() >= opt.n_max) continue;
    for (std::size_t b = 0; b < map.branch_count(); ++b) {
      const Interval& xi = map.branches()[b].domain;
      const double lo = std::max(piece.image.lo, xi.lo);
      const double hi = std::min(piece.image.hi, xi.hi);
      if (!(hi - lo > opt.min_width)) continue;
      const auto to = tower.target(piece.node, b);
      if (!to) {
        ++out.escaped_pieces;
        continue;
      }
      const Interval img = Interval::hull(map.eval(b, lo), map.eval(b, hi));
      std::vector<std::uint8_t> path = piece.path;
      path.push_back(static_cast<std::uint8_t>(b));
      if (*to != node_id) {
        live.push_back({img, *to, std::move(path)});
        continue;
      }
      const auto hit = intersect(img, J);
      if (hit && hit->width() > opt.min_width) {
        ReturnBranch rb;
        rb.domain = pull_back_path(*hit, path);
        rb.time = path.size();
        rb.onto = img.contains(J, 1e-12);
        rb.min_multiplier = min_multiplier(rb.domain, rb.time);
        rb.path = path;
        out.branches.push_back(std::move(rb));
      }
      // Parts of the image outside J keep travelling.
      if (img.lo < J.lo && J.lo - img.lo > opt.min_width) live.push_back({{img.lo, std::min(J.lo, img.hi)}, *to, path});
      if (img.hi > J.hi && img.hi - J.hi > opt.min_width) live.push_back({{std::max(J.hi, img.lo), img.hi}, *to, path});
    }
  }
  std::sort(out.branches.begin(), out.branches.end(),
            [](const ReturnBranch& a, const ReturnBranch& b) { return a.domain.lo < b.domain.lo; });
  return out;
}

}  // namespace ldyn

#endif  // LDYN_HOFBAUER_HPP
