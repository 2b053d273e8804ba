#include "mmfplan/paths.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace mmfplan {

namespace {

bool same_length(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Lexicographic comparison of node-id sequences.
bool ids_less(const std::vector<NodeIndex>& a, const std::vector<NodeIndex>& b,
              const Topology& topo) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [&](NodeIndex x, NodeIndex y) {
        return topo.nodes()[x].id < topo.nodes()[y].id;
      });
}

struct Label {
  double dist = 0.0;
  std::vector<NodeIndex> nodes;
  std::vector<LinkIndex> links;
};

// Shortest path under (length, id sequence) that avoids the blocked nodes
// and links. Lexicographic minimality is preserved under extension for simple
// paths, so label-setting works.
std::optional<Path> best_path(const Topology& topo, NodeIndex source,
                              NodeIndex target,
                              const std::vector<char>& node_blocked,
                              const std::vector<char>& link_blocked) {
  const std::size_t n = topo.node_count();
  std::vector<std::optional<Label>> best(n);
  std::vector<char> done(n, 0);
  auto label_less = [&](const Label& a, const Label& b) {
    if (!same_length(a.dist, b.dist)) return a.dist < b.dist;
    return ids_less(a.nodes, b.nodes, topo);
  };
  best[source] = Label{0.0, {source}, {}};
  for (;;) {
    std::optional<NodeIndex> pick;
    for (NodeIndex v = 0; v < n; ++v) {
      if (done[v] || !best[v]) continue;
      if (!pick || label_less(*best[v], *best[*pick])) pick = v;
    }
    if (!pick) break;
    const NodeIndex u = *pick;
    done[u] = 1;
    if (u == target) break;
    for (LinkIndex l : topo.out_links(u)) {
      if (link_blocked[l]) continue;
      const NodeIndex w = topo.links()[l].to;
      if (node_blocked[w] || done[w]) continue;
      Label cand = *best[u];
      cand.dist += topo.links()[l].length_m;
      cand.nodes.push_back(w);
      cand.links.push_back(l);
      if (!best[w] || label_less(cand, *best[w])) best[w] = std::move(cand);
    }
  }
  if (!best[target] || !done[target]) return std::nullopt;
  return Path{best[target]->nodes, best[target]->links, best[target]->dist};
}

}  // namespace

bool path_precedes(const Path& a, const Path& b, const Topology& topology) {
  if (!same_length(a.length_m, b.length_m)) return a.length_m < b.length_m;
  return ids_less(a.nodes, b.nodes, topology);
}

std::vector<Path> k_shortest_paths(const Topology& topology, NodeIndex source,
                                   NodeIndex target, int k) {
  std::vector<Path> found;
  if (k < 1 || source == target || source >= topology.node_count() ||
      target >= topology.node_count()) {
    return found;
  }
  std::vector<char> node_blocked(topology.node_count(), 0);
  std::vector<char> link_blocked(topology.link_count(), 0);
  auto first = best_path(topology, source, target, node_blocked, link_blocked);
  if (!first) return found;
  found.push_back(std::move(*first));

  std::vector<Path> pending;
  auto known = [&](const Path& p) {
    auto same = [&](const Path& q) { return q.nodes == p.nodes; };
    return std::any_of(found.begin(), found.end(), same) ||
           std::any_of(pending.begin(), pending.end(), same);
  };

  while (static_cast<int>(found.size()) < k) {
    const Path prev = found.back();
    for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      const NodeIndex spur = prev.nodes[i];
      std::fill(node_blocked.begin(), node_blocked.end(), 0);
      std::fill(link_blocked.begin(), link_blocked.end(), 0);
      for (const Path& p : found) {
        if (p.nodes.size() > i &&
            std::equal(prev.nodes.begin(), prev.nodes.begin() + i + 1,
                       p.nodes.begin())) {
          link_blocked[p.links[i]] = 1;
        }
      }
      for (std::size_t j = 0; j < i; ++j) node_blocked[prev.nodes[j]] = 1;

      auto tail = best_path(topology, spur, target, node_blocked, link_blocked);
      if (!tail) continue;
      Path total;
      total.nodes.assign(prev.nodes.begin(), prev.nodes.begin() + i);
      total.nodes.insert(total.nodes.end(), tail->nodes.begin(),
                         tail->nodes.end());
      total.links.assign(prev.links.begin(), prev.links.begin() + i);
      total.links.insert(total.links.end(), tail->links.begin(),
                         tail->links.end());
      total.length_m = tail->length_m;
      for (std::size_t j = 0; j < i; ++j) {
        total.length_m += topology.links()[prev.links[j]].length_m;
      }
      if (!known(total)) pending.push_back(std::move(total));
    }
    if (pending.empty()) break;
    auto best_it = std::min_element(
        pending.begin(), pending.end(), [&](const Path& a, const Path& b) {
          return path_precedes(a, b, topology);
        });
    found.push_back(std::move(*best_it));
    pending.erase(best_it);
  }
  return found;
}

}  // namespace mmfplan
