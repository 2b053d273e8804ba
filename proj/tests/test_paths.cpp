#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "mmfplan/paths.hpp"
#include "oracle.hpp"

using namespace mmfplan;

namespace {

std::vector<std::string> ids(const Topology& t, const Path& p) {
  std::vector<std::string> out;
  for (NodeIndex n : p.nodes) out.push_back(t.nodes()[n].id);
  return out;
}

Path as_path(const Topology& t, const std::vector<LinkIndex>& links) {
  Path p;
  p.links = links;
  p.nodes.push_back(t.links()[links.front()].from);
  for (LinkIndex l : links) {
    p.nodes.push_back(t.links()[l].to);
    p.length_m += t.links()[l].length_m;
  }
  return p;
}

}  // namespace

TEST_CASE("fat tree edge to edge") {
  const Topology t = build_fat_tree(4, 2, 2, 100.0);
  const auto paths = k_shortest_paths(t, *t.find_node("E1"), *t.find_node("E2"), 4);
  REQUIRE(paths.size() == 4);
  using V = std::vector<std::string>;
  CHECK(ids(t, paths[0]) == V{"E1", "A1", "E2"});
  CHECK(ids(t, paths[1]) == V{"E1", "A2", "E2"});
  CHECK(paths[0].length_m == 200.0);
  CHECK(paths[2].length_m == 400.0);
  CHECK(ids(t, paths[2]) == V{"E1", "A1", "C1", "A2", "E2"});
  CHECK(ids(t, paths[3]) == V{"E1", "A1", "C2", "A2", "E2"});
}

TEST_CASE("disconnected and degenerate") {
  Topology t;
  const NodeIndex a = t.add_node("a", Tier::kOther);
  const NodeIndex b = t.add_node("b", Tier::kOther);
  t.add_link(b, a, 10.0);
  CHECK(k_shortest_paths(t, a, b, 3).empty());
  CHECK(k_shortest_paths(t, b, a, 0).empty());
  CHECK(k_shortest_paths(t, b, a, 3).size() == 1);
}

TEST_CASE("matches sorted enumeration of all simple paths") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    Topology t;
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    for (int i = 0; i < n; ++i) t.add_node(std::string(1, static_cast<char>('a' + i)), Tier::kOther);
    const double lengths[] = {1.0, 2.0, 3.0};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng() % 2) t.add_link(i, j, lengths[rng() % 3]);
    const NodeIndex s = 0, d = n - 1;
    std::vector<Path> all;
    for (const auto& links : oracle::simple_paths(t, s, d)) all.push_back(as_path(t, links));
    std::sort(all.begin(), all.end(),
              [&](const Path& x, const Path& y) { return path_precedes(x, y, t); });
    const int k = 5;
    const auto got = k_shortest_paths(t, s, d, k);
    const std::size_t want = std::min<std::size_t>(k, all.size());
    REQUIRE(got.size() == want);
    for (std::size_t i = 0; i < want; ++i) {
      CHECK(got[i].nodes == all[i].nodes);
      CHECK(got[i].length_m == doctest::Approx(all[i].length_m));
    }
  }
}
