// k-shortest simple paths (Yen) over the directed topology.
//
// Paths are totally ordered by (total length, node-id sequence compared
// lexicographically), which makes the k-best list unique.

#ifndef MMFPLAN_PATHS_HPP_
#define MMFPLAN_PATHS_HPP_

#include <vector>

#include "mmfplan/model.hpp"

namespace mmfplan {

struct Path {
  std::vector<NodeIndex> nodes;
  std::vector<LinkIndex> links;
  double length_m = 0.0;

  bool operator==(const Path&) const = default;
};

// Strict total order used for path ranking.
bool path_precedes(const Path& a, const Path& b, const Topology& topology);

std::vector<Path> k_shortest_paths(const Topology& topology, NodeIndex source,
                                   NodeIndex target, int k);

}  // namespace mmfplan

#endif  // MMFPLAN_PATHS_HPP_
