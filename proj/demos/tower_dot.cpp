// Prints the Hofbauer tower of a map as Graphviz DOT.
//   demo_tower_dot tent:1.8 6 | dot -Tsvg > tower.svg
#include <cstdlib>
#include <iostream>

#include "ldyn/ldyn.hpp"

int main(int argc, char** argv) {
  using namespace ldyn;
  const IntervalMap map = parse_map(argc > 1 ? argv[1] : "tent:1.8");
  TowerOptions opt;
  opt.depth_cap = argc > 2 ? static_cast<std::size_t>(std::atoi(argv[2])) : 6;
  const Tower t = build_tower(map, opt);
  write_dot(std::cout, t);
  std::cerr << t.size() << " nodes, " << t.edges().size() << " edges\n";
}
