#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

namespace oracle {

using namespace mmfplan;

namespace {

struct Cand {
  std::vector<LinkIndex> links;
  std::vector<int> modes;
  int t0 = 0;
  int t1 = 0;
  std::int64_t cells = 0;
};

double domain_term(const Instance& inst, int aggressor, int victim, double len) {
  const double y = inst.crosstalk.db_per_100m(aggressor, victim);
  if (inst.planner.accumulation.kind == AccumulationKind::kTanhCoupling) {
    double ymax = -1e300;
    for (int a = 0; a < inst.mode_count; ++a)
      for (int v = 0; v < inst.mode_count; ++v)
        if (a != v) ymax = std::max(ymax, inst.crosstalk.db_per_100m(a, v));
    return std::tanh(inst.planner.accumulation.coupling_per_m * len) *
           std::pow(10.0, (y - ymax) / 10.0);
  }
  return len / 100.0 * std::pow(10.0, y / 10.0);
}

}  // namespace

std::vector<std::vector<LinkIndex>> simple_paths(const Topology& topology, NodeIndex s,
                                                 NodeIndex d) {
  std::vector<std::vector<LinkIndex>> out;
  std::vector<bool> seen(topology.node_count(), false);
  std::vector<LinkIndex> stack;
  std::function<void(NodeIndex)> walk = [&](NodeIndex n) {
    if (n == d) {
      out.push_back(stack);
      return;
    }
    seen[n] = true;
    for (LinkIndex l = 0; l < topology.link_count(); ++l) {
      const Link& link = topology.links()[l];
      if (link.from != n || seen[link.to]) continue;
      stack.push_back(l);
      walk(link.to);
      stack.pop_back();
    }
    seen[n] = false;
  };
  walk(s);
  return out;
}

double linear_power_db(const CrosstalkMatrix& y, int victim_mode,
                       const std::vector<std::pair<double, int>>& overlaps) {
  if (overlaps.empty()) return -INFINITY;
  double sum = 0.0;
  for (const auto& [len, aggressor] : overlaps) {
    sum += len / 100.0 * std::pow(10.0, y.db_per_100m(aggressor, victim_mode) / 10.0);
  }
  return 10.0 * std::log10(sum);
}

Result brute_force(const Instance& inst) {
  const std::size_t R = inst.requests.size();
  const int M = inst.mode_count;
  const int T = inst.slot_count();
  const double cap = inst.planner.link_capacity_gbps * inst.frame.slice_ms /
                     inst.frame.frame_ms;
  const double limit = inst.planner.xt_threshold_db;

  std::vector<std::vector<Cand>> cands(R);
  for (std::size_t r = 0; r < R; ++r) {
    const Request& req = inst.requests[r];
    const int q = static_cast<int>(std::ceil(req.bandwidth_gbps / cap - 1e-9));
    for (const auto& path : simple_paths(inst.topology, req.source, req.destination)) {
      for (int mask = 1; mask < (1 << M); ++mask) {
        std::vector<int> modes;
        for (int m = 0; m < M; ++m)
          if (mask & (1 << m)) modes.push_back(m);
        for (int t0 = 0; t0 < T; ++t0)
          for (int t1 = t0 + 1; t1 <= T; ++t1) {
            const int supply = static_cast<int>(modes.size()) * (t1 - t0);
            if (supply < q) continue;
            cands[r].push_back(Cand{path, modes, t0, t1,
                                    static_cast<std::int64_t>(path.size()) * supply});
          }
      }
    }
  }

  Result best;
  std::vector<const Cand*> pick(R, nullptr);
  std::vector<double> acc(R, 0.0);

  auto clash = [&](const Cand& a, const Cand& b) {
    if (a.t1 <= b.t0 || b.t1 <= a.t0) return false;
    for (LinkIndex l : a.links)
      if (std::find(b.links.begin(), b.links.end(), l) != b.links.end())
        for (int m : a.modes)
          if (std::find(b.modes.begin(), b.modes.end(), m) != b.modes.end()) return true;
    return false;
  };
  // Crosstalk `victim` receives from `aggressor`.
  auto received = [&](const Cand& victim, const Cand& aggressor) {
    if (victim.t1 <= aggressor.t0 || aggressor.t1 <= victim.t0) return 0.0;
    double sum = 0.0;
    for (LinkIndex l : victim.links) {
      if (std::find(aggressor.links.begin(), aggressor.links.end(), l) ==
          aggressor.links.end())
        continue;
      const double len = inst.topology.links()[l].length_m;
      for (int mv : victim.modes)
        for (int ma : aggressor.modes)
          if (mv != ma) sum += domain_term(inst, ma, mv, len);
    }
    return sum;
  };
  auto ok_db = [&](double a) {
    return a <= 0.0 || 10.0 * std::log10(a) <= limit + 1e-9;
  };

  std::function<void(std::size_t, double, std::int64_t)> go =
      [&](std::size_t r, double tp, std::int64_t cells) {
        if (r == R) {
          ++best.leaves;
          const bool more = tp > best.throughput_gbps + kEps;
          const bool same = std::abs(tp - best.throughput_gbps) <= kEps;
          if (best.leaves == 1 || more || (same && cells < best.lambda_count)) {
            best.throughput_gbps = tp;
            best.lambda_count = cells;
          }
          return;
        }
        go(r + 1, tp, cells);
        for (const Cand& c : cands[r]) {
          bool fine = true;
          for (std::size_t j = 0; j < r && fine; ++j)
            if (pick[j] && clash(c, *pick[j])) fine = false;
          if (!fine) continue;
          std::vector<double> saved = acc;
          double mine = 0.0;
          for (std::size_t j = 0; j < r; ++j) {
            if (!pick[j]) continue;
            mine += received(c, *pick[j]);
            acc[j] += received(*pick[j], c);
          }
          acc[r] = mine;
          for (std::size_t j = 0; j <= r && fine; ++j)
            if ((j == r || pick[j]) && !ok_db(acc[j])) fine = false;
          if (fine) {
            pick[r] = &c;
            go(r + 1, tp + inst.requests[r].bandwidth_gbps, cells + c.cells);
            pick[r] = nullptr;
          }
          acc = saved;
        }
      };
  go(0, 0.0, 0);
  return best;
}

Instance random_micro(std::mt19937_64& rng, const MicroOptions& opts) {
  auto uni = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  Instance inst;
  const int n = uni(2, opts.max_nodes);
  for (int i = 0; i < n; ++i) inst.topology.add_node(fmt::format("N{}", i + 1), Tier::kEdge);
  const double lengths[] = {100.0, 200.0, 300.0, 500.0};
  bool any = false;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b || uni(0, 1) == 0) continue;
      inst.topology.add_link(a, b, lengths[uni(0, 3)]);
      any = true;
    }
  if (!any) inst.topology.add_link(0, 1, lengths[uni(0, 3)]);

  inst.mode_count = uni(1, opts.max_modes);
  std::vector<ModeIndex> all{0, 1, 2, 3};
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(inst.mode_count);
  inst.crosstalk = CrosstalkMatrix::reference_table().restricted(all);

  const int slots = uni(1, opts.max_slots);
  inst.frame = FrameConfig{5.0 * slots, 5.0, std::nullopt};
  const double thresholds[] = {-10.0, -13.0, -13.0, -16.0, -20.0};
  inst.planner.xt_threshold_db = thresholds[uni(0, 4)];
  if (opts.allow_tanh && uni(0, 4) == 0) {
    const double hs[] = {1e-4, 5e-4, 2e-3};
    inst.planner.accumulation = {AccumulationKind::kTanhCoupling, hs[uni(0, 2)]};
  }

  const int r = uni(1, opts.max_requests);
  for (int i = 0; i < r; ++i) {
    const NodeIndex s = uni(0, n - 1);
    NodeIndex d = uni(0, n - 2);
    if (d >= s) ++d;
    inst.requests.push_back(
        Request{fmt::format("q{}", i + 1), s, d, static_cast<double>(uni(1, 10))});
  }
  inst.validate();
  return inst;
}

}  // namespace oracle
