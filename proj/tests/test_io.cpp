#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ldyn/io.hpp"

using namespace ldyn;

TEST(Io, MapRoundTrip) {
  for (const IntervalMap& m :
       {IntervalMap(Family::logistic, 3.7), IntervalMap(Family::tent, 1.5), IntervalMap(Family::sine, 1.0)}) {
    const IntervalMap back = map_from_json(json::parse(to_json(m).dump()));
    EXPECT_EQ(back.name(), m.name());
    EXPECT_EQ(back(0.3), m(0.3));
  }
  EXPECT_TRUE(to_json(IntervalMap(Family::sine, 1.0))["param"].is_null());
}

TEST(Io, NumbersKeepAllDigits) {
  EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(fmt17(std::log(2.0))), std::log(2.0));
  EXPECT_EQ(fmt17(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_TRUE(num(std::nan("")).is_null());
}

TEST(Io, ProfileCsvLayout) {
  LyapunovProfile p;
  p.checkpoints = {{10, 0.5}, {100, 0.25}};
  std::ostringstream os;
  write_profile_csv(os, p, json{{"command", "lyap"}, {"n", 100}});
  EXPECT_EQ(os.str(), "# command=\"lyap\"\n# n=100\nn,lambda_n\n10,0.5\n100,0.25\n");
}

TEST(Io, TowerJsonAndDot) {
  TowerOptions o;
  o.depth_cap = 4;
  const Tower t = build_tower(IntervalMap(Family::tent, 2.0), o);
  const json j = to_json(t);
  ASSERT_EQ(j["nodes"].size(), 1u);
  EXPECT_EQ(j["nodes"][0]["lo"], 0.0);
  EXPECT_EQ(j["nodes"][0]["hi"], 1.0);
  EXPECT_EQ(j["edges"].size(), 2u);
  std::ostringstream dot;
  write_dot(dot, t);
  EXPECT_EQ(dot.str(), "digraph tower {\n  n0 [label=\"[0, 1] @0\"];\n  n0 -> n0 [label=\"0\"];\n  n0 -> n0 [label=\"1\"];\n}\n");
}

TEST(Io, KneadingJson) {
  const json j = to_json(kneading(IntervalMap(Family::tent, 2.0), 2));
  EXPECT_EQ(j["S"], json::parse("[1,2,3]"));
  EXPECT_EQ(j["z"][0], 0.25);
  EXPECT_FALSE(j.contains("truncation_reason"));
}
