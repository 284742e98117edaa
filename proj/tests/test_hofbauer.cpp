#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ldyn/hofbauer.hpp"
#include "ldyn/lyapunov.hpp"
#include "oracles.hpp"

using namespace ldyn;

namespace {
Tower tower_of(const IntervalMap& m, std::size_t cap) {
  TowerOptions o;
  o.depth_cap = cap;
  return build_tower(m, o);
}

std::set<std::pair<double, double>> interval_set(const Tower& t) {
  std::set<std::pair<double, double>> s;
  for (const auto& n : t.nodes()) s.emplace(n.interval.lo, n.interval.hi);
  return s;
}
}  // namespace

TEST(Hofbauer, FullBranchMapsHaveOneNode) {
  for (const IntervalMap& m : {IntervalMap(Family::tent, 2.0), IntervalMap(Family::logistic, 4.0)}) {
    const Tower t = tower_of(m, 10);
    EXPECT_EQ(t.size(), 1u) << m.name();
    EXPECT_EQ(t.edges().size(), 2u);
    EXPECT_EQ(*t.target(0, 0), 0u);
    EXPECT_EQ(*t.target(0, 1), 0u);
  }
}

TEST(Hofbauer, TentSqrt2MatchesExactOracle) {
  const IntervalMap m(Family::tent, std::sqrt(2.0));
  for (std::size_t cap = 1; cap <= 8; ++cap)
    EXPECT_EQ(tower_of(m, cap).size(), oracle::tent_sqrt2_tower_size(cap)) << "cap=" << cap;
  // The critical orbit lands on the fixed point 2 - √2 after three steps, so the tower is finite.
  EXPECT_EQ(tower_of(m, 30).size(), tower_of(m, 60).size());
}

TEST(Hofbauer, MarkovClosure) {
  for (double s : {1.5, 1.8, 1.95}) {
    const IntervalMap m(Family::tent, s);
    for (std::size_t cap = 1; cap <= 8; ++cap) {
      const MarkovReport r = check_markov(tower_of(m, cap), m);
      EXPECT_TRUE(r.ok(1e-9)) << "s=" << s << " cap=" << cap << " edge=" << r.max_edge_residual
                              << " prov=" << r.max_provenance_residual;
      EXPECT_GT(r.checked_edges, 0u);
    }
  }
  const IntervalMap f(Family::logistic, 3.7);
  EXPECT_TRUE(check_markov(tower_of(f, 8), f).ok(1e-9));
}

// Property: node intervals are subsets of the domain, depths grow by one
// along tree edges, and nothing below the cap is left unexpanded.
TEST(Hofbauer, StructuralInvariants) {
  const IntervalMap m(Family::logistic, 3.83);
  const Tower t = tower_of(m, 9);
  for (const auto& n : t.nodes()) {
    EXPECT_LE(0.0, n.interval.lo);
    EXPECT_LE(n.interval.hi, 1.0);
    EXPECT_LT(n.interval.lo, n.interval.hi);
    EXPECT_LE(n.depth, 9u);
  }
  for (const auto& e : t.edges()) EXPECT_LE(t.node(e.to).depth, t.node(e.from).depth + 1);
}

TEST(Hofbauer, BranchOrderDoesNotChangeTheNodeSet) {
  for (const IntervalMap& m : {IntervalMap(Family::tent, 1.8), IntervalMap(Family::logistic, 3.6)}) {
    TowerOptions a;
    a.depth_cap = 8;
    TowerOptions b = a;
    b.reverse_branch_order = true;
    EXPECT_EQ(interval_set(build_tower(m, a)), interval_set(build_tower(m, b))) << m.name();
  }
}

TEST(Hofbauer, NodeLimitMarksPartial) {
  TowerOptions o;
  o.depth_cap = 50;
  o.node_limit = 10;
  const Tower t = build_tower(IntervalMap(Family::logistic, 3.9), o);
  EXPECT_TRUE(t.partial());
  EXPECT_LE(t.size(), 10u);
}

// Property: the lift projects to the orbit.
TEST(Hofbauer, LiftProjectsToOrbit) {
  const IntervalMap m(Family::logistic, 3.9);
  const Tower t = tower_of(m, 40);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const double x = unit_uniform(rng);
    const Lift lift = lift_orbit(t, m, x, 200);
    const auto orbit = eval_orbit(m, x, lift.points.size() - 1);
    for (std::size_t i = 0; i < lift.points.size(); ++i) {
      EXPECT_EQ(lift.points[i].x, orbit[i]);
      EXPECT_TRUE(t.node(lift.points[i].node).interval.contains(orbit[i], 1e-9));
    }
  }
}

TEST(Hofbauer, LiftOfAttractingFixedPointClimbs) {
  const IntervalMap m(Family::logistic, 2.5);
  const std::size_t cap = 18;
  const Tower t = tower_of(m, cap);
  const Lift lift = lift_orbit(t, m, 0.6 + 1e-6, 200);
  // Depth increases by one each step until the cap is crossed.
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < lift.points.size(); ++i) {
    EXPECT_TRUE(seen.insert(lift.points[i].node).second) << "revisit at step " << i;
    if (i > 0) {
      EXPECT_EQ(t.node(lift.points[i].node).depth, t.node(lift.points[i - 1].node).depth + 1);
    }
  }
  EXPECT_TRUE(lift.truncated);
  EXPECT_EQ(t.node(lift.points.back().node).depth, cap);
  // Mass on K_N drains away.
  const MassProfile mp = mass_profile(t, m, 0.6 + 1e-6, 200, 4);
  EXPECT_LT(mp.m.back(), 0.5);
}

TEST(Hofbauer, RepellingFixedPointLiftsToNodeCycle) {
  const IntervalMap m(Family::tent, 1.9);
  const Tower t = tower_of(m, 12);
  const double p = 1.9 / 2.9;
  const Lift lift = lift_orbit(t, m, p, 40);
  const auto cyc = detect_node_cycle(t, lift);
  ASSERT_TRUE(cyc);
  EXPECT_EQ(cyc->period, 1u);
  EXPECT_LE(cyc->max_depth, 4u);
  EXPECT_TRUE(t.node(cyc->nodes[0]).interval.contains(p));
}

TEST(Hofbauer, FirstReturnBranchesExpand) {
  const IntervalMap m(Family::tent, 1.9);
  const Tower t = tower_of(m, 12);
  const double p = 1.9 / 2.9;
  const Lift lift = lift_orbit(t, m, p, 40);
  const auto cyc = detect_node_cycle(t, lift);
  ASSERT_TRUE(cyc);
  const Interval J{p - 0.01, p + 0.01};
  FirstReturnOptions o;
  o.n_max = 14;
  const FirstReturn fr = first_return(t, m, cyc->nodes[0], J, o);
  ASSERT_GE(fr.branches.size(), 5u);
  for (const ReturnBranch& b : fr.branches) {
    EXPECT_GT(b.min_multiplier, 1.0);
    EXPECT_TRUE(J.contains(b.domain, 1e-12));
    EXPECT_EQ(b.path.size(), b.time);
    // A tent branch of length n has multiplier 1.9^n.
    EXPECT_NEAR(b.min_multiplier, std::pow(1.9, static_cast<double>(b.time)), 1e-9 * std::pow(1.9, b.time));
  }
  // Branch domains are pairwise disjoint.
  std::vector<Interval> doms;
  for (const auto& b : fr.branches) doms.push_back(b.domain);
  std::sort(doms.begin(), doms.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < doms.size(); ++i) EXPECT_LE(doms[i - 1].hi, doms[i].lo + 1e-15);
}

TEST(Hofbauer, FirstReturnLogistic4) {
  const IntervalMap m(Family::logistic, 4.0);
  const Tower t = tower_of(m, 5);
  FirstReturnOptions o;
  o.n_max = 10;
  const FirstReturn fr = first_return(t, m, 0, Interval{0.70, 0.78}, o);
  EXPECT_GE(fr.branches.size(), 3u);
  for (const ReturnBranch& b : fr.branches) EXPECT_GT(b.min_multiplier, 1.0);
}

TEST(Hofbauer, FirstReturnRejectsJOutsideNode) {
  const IntervalMap m(Family::tent, 1.9);
  const Tower t = tower_of(m, 5);
  EXPECT_THROW(first_return(t, m, 0, Interval{0.9, 1.2}), Error);
}
