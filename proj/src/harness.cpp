#include "mmfplan/harness.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

namespace mmfplan::harness {

namespace {

bool is_multiple(double x, double g) {
  const double k = std::round(x / g);
  return std::abs(x - k * g) <= 1e-9 * std::max(1.0, std::abs(x));
}

}  // namespace

std::vector<Request> gen_uniform_traffic(const Topology& topology,
                                         double load_gbps,
                                         double granularity_gbps,
                                         std::uint64_t seed,
                                         double capacity_gbps) {
  const std::vector<NodeIndex> edges = topology.nodes_in_tier(Tier::kEdge);
  if (edges.size() < 2) {
    throw Error(ErrorKind::kInvalidTopology,
                fmt::format("traffic needs at least 2 edge switches, found {}",
                            edges.size()));
  }
  if (!(granularity_gbps > 0.0) || !(capacity_gbps >= granularity_gbps)) {
    throw Error(ErrorKind::kInvalidParameter,
                "granularity must be positive and at most the capacity");
  }
  if (!(load_gbps >= 0.0) || !std::isfinite(load_gbps)) {
    throw Error(ErrorKind::kInvalidParameter, "offered load must be >= 0");
  }
  if (!is_multiple(load_gbps, granularity_gbps)) {
    throw Error(ErrorKind::kInvalidParameter,
                fmt::format("offered load {} is not a multiple of {} Gb/s",
                            load_gbps, granularity_gbps));
  }

  const int steps = static_cast<int>(std::floor(capacity_gbps / granularity_gbps + 1e-9));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_src(0, edges.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_dst(0, edges.size() - 2);
  std::uniform_int_distribution<int> pick_bw(1, steps);

  std::vector<Request> out;
  double total = 0.0;
  while (total < load_gbps - 1e-9) {
    const std::size_t s = pick_src(rng);
    std::size_t d = pick_dst(rng);
    if (d >= s) ++d;
    double bw = pick_bw(rng) * granularity_gbps;
    if (total + bw > load_gbps) {
      bw = std::round((load_gbps - total) / granularity_gbps) * granularity_gbps;
    }
    out.push_back(Request{fmt::format("r{}", out.size() + 1), edges[s], edges[d], bw});
    total += bw;
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t load_index,
                        std::size_t trial) {
  return splitmix64(splitmix64(master ^ splitmix64(load_index)) ^ trial);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double bisection_capacity_gbps(const Instance& instance) {
  const auto edges = instance.topology.nodes_in_tier(Tier::kEdge);
  std::size_t uplinks = 0;
  for (std::size_t i = 0; i < edges.size() / 2; ++i) {
    uplinks += instance.topology.out_links(edges[i]).size();
  }
  return static_cast<double>(uplinks) * instance.mode_count *
         instance.planner.link_capacity_gbps;
}

Instance fig2_instance() {
  Instance inst;
  inst.topology = build_fat_tree(4, 2, 2, 100.0);
  inst.mode_count = 4;
  inst.crosstalk = CrosstalkMatrix::reference_table();
  inst.frame = FrameConfig{20.0, 5.0, std::nullopt};
  inst.validate();
  return inst;
}

Instance fig4_instance() {
  Instance inst;
  Topology& t = inst.topology;
  const NodeIndex e1 = t.add_node("E1", Tier::kEdge);
  const NodeIndex e2 = t.add_node("E2", Tier::kEdge);
  const NodeIndex e3 = t.add_node("E3", Tier::kEdge);
  const NodeIndex e4 = t.add_node("E4", Tier::kEdge);
  const NodeIndex a1 = t.add_node("A1", Tier::kAggregation);
  const NodeIndex c1 = t.add_node("C1", Tier::kCore);
  t.add_link(e1, a1, 100.0);  // a
  t.add_link(e2, a1, 100.0);  // b
  t.add_link(a1, c1, 500.0);  // c
  t.add_link(e3, a1, 100.0);  // d
  t.add_link(e4, a1, 100.0);  // e

  inst.mode_count = 4;
  inst.mode_labels = {"LP01", "LP11", "LP02", "LP31"};
  inst.crosstalk = CrosstalkMatrix::reference_table();
  inst.frame = FrameConfig{20.0, 5.0, 50.0};
  inst.planner.granularity_gbps = 0.5;

  const std::pair<const char*, NodeIndex> reqs[] = {
      {"A", e1}, {"B", e1}, {"C", e1}, {"D", e2},
      {"E", e3}, {"F", e3}, {"G", e4},
  };
  for (const auto& [id, src] : reqs) {
    inst.requests.push_back(Request{id, src, c1, 2.5});
  }
  inst.validate();
  return inst;
}

Schedule fig4_schedule(const Instance& fig4) {
  const Topology& t = fig4.topology;
  auto link = [&](const char* from, const char* to) {
    return *t.find_link(*t.find_node(from), *t.find_node(to));
  };
  auto place = [&](const char* id, const char* src, ModeIndex m, int slot) {
    return Assignment{*fig4.find_request(id), {link(src, "A1"), link("A1", "C1")},
                      {m}, slot, slot + 1};
  };
  Schedule s;
  s.accepted = {place("A", "E1", 0, 0), place("B", "E1", 0, 1),
                place("C", "E1", 0, 2), place("D", "E2", 1, 3),
                place("G", "E4", 3, 0)};
  s.rejected = {*fig4.find_request("E"), *fig4.find_request("F")};
  s.refresh_objective(fig4);
  return s;
}

Instance tiny_instance() {
  Instance inst;
  const NodeIndex a = inst.topology.add_node("E1", Tier::kEdge);
  const NodeIndex b = inst.topology.add_node("E2", Tier::kEdge);
  inst.topology.add_link(a, b, 100.0);
  inst.mode_count = 2;
  inst.crosstalk = CrosstalkMatrix::reference_table().restricted({0, 1});
  inst.frame = FrameConfig{10.0, 5.0, std::nullopt};
  inst.requests = {Request{"A", a, b, 5.0}, Request{"B", a, b, 10.0}};
  inst.validate();
  return inst;
}

Instance fixture(std::string_view name) {
  if (name == "fig2") return fig2_instance();
  if (name == "fig4") return fig4_instance();
  if (name == "tiny") return tiny_instance();
  throw Error(ErrorKind::kInvalidParameter,
              fmt::format("unknown fixture '{}' (fig2, fig4, tiny)", name));
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kExact: return "exact";
    case SolverKind::kGreedy: return "greedy";
    case SolverKind::kBaseline: return "baseline";
  }
  return "?";
}

SolverKind solver_from_string(std::string_view s) {
  if (s == "exact") return SolverKind::kExact;
  if (s == "greedy") return SolverKind::kGreedy;
  if (s == "baseline") return SolverKind::kBaseline;
  throw Error(ErrorKind::kInvalidParameter,
              fmt::format("unknown solver '{}' (exact, greedy, baseline)", s));
}

namespace {

bool lex_ahead(const Schedule& a, const Schedule& b) {
  if (std::abs(a.throughput_gbps - b.throughput_gbps) > kEps) {
    return a.throughput_gbps > b.throughput_gbps;
  }
  return a.lambda_count < b.lambda_count;
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Solutions for one cell, computed on demand and shared between solvers.
class Cell {
 public:
  Cell(const Instance& instance, const solve::SolveLimits& limits)
      : inst_(instance), limits_(limits) {}

  const Schedule& greedy() {
    if (!greedy_) {
      const auto t0 = Clock::now();
      greedy_ = solve::solve_greedy(inst_, limits_);
      greedy_ms_ = ms_since(t0);
    }
    return *greedy_;
  }
  const Schedule& baseline() {
    if (!baseline_) {
      const auto t0 = Clock::now();
      baseline_ = solve::solve_baseline_conventional(inst_, limits_);
      baseline_ms_ = ms_since(t0);
    }
    return *baseline_;
  }
  const Schedule& exact() {
    if (!exact_) {
      const Schedule lifted = solve::lift_single_slot_schedule(baseline(), inst_);
      const Schedule& seed = lex_ahead(greedy(), lifted) ? greedy() : lifted;
      const auto t0 = Clock::now();
      exact_ = solve::solve_exact(inst_, limits_, &seed);
      exact_ms_ = ms_since(t0) + greedy_ms_ + baseline_ms_;
    }
    return *exact_;
  }

  double ms(SolverKind k) const {
    switch (k) {
      case SolverKind::kExact: return exact_ms_;
      case SolverKind::kGreedy: return greedy_ms_;
      case SolverKind::kBaseline: return baseline_ms_;
    }
    return 0.0;
  }

  const Schedule& get(SolverKind k) {
    switch (k) {
      case SolverKind::kExact: return exact();
      case SolverKind::kGreedy: return greedy();
      case SolverKind::kBaseline: return baseline();
    }
    return greedy();
  }

 private:
  const Instance& inst_;
  const solve::SolveLimits& limits_;
  std::optional<Schedule> greedy_, baseline_, exact_;
  double greedy_ms_ = 0.0, baseline_ms_ = 0.0, exact_ms_ = 0.0;
};

}  // namespace

Schedule run_solver(const Instance& instance, SolverKind kind,
                    const solve::SolveLimits& limits) {
  Cell cell(instance, limits);
  return cell.get(kind);
}

SweepResult run_sweep(const Instance& instance_template,
                      const SweepConfig& config) {
  if (config.loads_gbps.empty() || config.solvers.empty() || config.trials < 1) {
    throw Error(ErrorKind::kInvalidParameter,
                "sweep needs at least one load, one solver and one trial");
  }
  SweepResult result;
  result.seed = config.seed;
  std::string key = to_json(instance_template).dump();
  for (double l : config.loads_gbps) key += fmt::format(",{}", l);
  for (SolverKind s : config.solvers) key += fmt::format(",{}", to_string(s));
  key += fmt::format(",{},{},{},{},{}", config.trials, config.seed,
                     config.limits.node_budget, config.limits.k_paths,
                     static_cast<int>(config.limits.mode_subsets));
  result.digest = fnv1a64(key);

  for (std::size_t li = 0; li < config.loads_gbps.size(); ++li) {
    const double load = config.loads_gbps[li];
    for (int trial = 0; trial < config.trials; ++trial) {
      Instance inst = instance_template;
      inst.requests = gen_uniform_traffic(
          inst.topology, load, inst.planner.granularity_gbps,
          cell_seed(config.seed, li, static_cast<std::size_t>(trial)),
          inst.planner.link_capacity_gbps);
      Cell cell(inst, config.limits);
      for (SolverKind kind : config.solvers) {
        const Schedule& s = cell.get(kind);
        SweepRow row;
        row.load_gbps = load;
        row.trial = trial;
        row.solver = kind;
        row.throughput_gbps = s.throughput_gbps;
        row.acceptance_ratio =
            inst.requests.empty()
                ? 1.0
                : static_cast<double>(s.accepted.size()) / inst.requests.size();
        row.lambda_count = s.lambda_count;
        row.solve_ms = cell.ms(kind);
        row.optimal = s.optimal;
        result.rows.push_back(row);
      }
    }
  }
  return result;
}

std::vector<SweepMean> SweepResult::means() const {
  std::vector<SweepMean> out;
  std::map<std::pair<double, int>, std::size_t> at;
  for (const SweepRow& r : rows) {
    const auto key = std::make_pair(r.load_gbps, static_cast<int>(r.solver));
    auto it = at.find(key);
    if (it == at.end()) {
      it = at.emplace(key, out.size()).first;
      out.push_back(SweepMean{r.load_gbps, r.solver, 0.0, 0.0, 0});
    }
    SweepMean& m = out[it->second];
    m.throughput_gbps += r.throughput_gbps;
    m.acceptance_ratio += r.acceptance_ratio;
    ++m.trials;
  }
  for (SweepMean& m : out) {
    m.throughput_gbps /= m.trials;
    m.acceptance_ratio /= m.trials;
  }
  return out;
}

std::string SweepResult::to_csv() const {
  std::string out =
      "load_gbps,trial,solver,throughput_gbps,acceptance_ratio,lambda_count,"
      "solve_ms,optimal\n";
  for (const SweepRow& r : rows) {
    out += fmt::format("{},{},{},{},{:.6f},{},{:.3f},{}\n", r.load_gbps, r.trial,
                       to_string(r.solver), r.throughput_gbps, r.acceptance_ratio,
                       r.lambda_count, r.solve_ms, r.optimal ? "true" : "false");
  }
  return out;
}

Json SweepResult::metadata(const SweepConfig& config) const {
  Json j;
  j["seed"] = seed;
  j["config_digest"] = fmt::format("{:016x}", digest);
  j["bandwidth_law"] = std::string(kBandwidthLaw);
  j["trials"] = config.trials;
  j["loads_gbps"] = config.loads_gbps;
  Json solvers = Json::array();
  for (SolverKind s : config.solvers) solvers.push_back(std::string(to_string(s)));
  j["solvers"] = solvers;
  j["limits"] = {{"node_budget", config.limits.node_budget},
                 {"wall_clock_s", config.limits.wall_clock_s},
                 {"k_paths", config.limits.k_paths}};
  Json means_j = Json::array();
  for (const SweepMean& m : means()) {
    means_j.push_back({{"load_gbps", m.load_gbps},
                       {"solver", std::string(to_string(m.solver))},
                       {"mean_throughput_gbps", m.throughput_gbps},
                       {"mean_acceptance_ratio", m.acceptance_ratio},
                       {"trials", m.trials}});
  }
  j["means"] = means_j;
  return j;
}

}  // namespace mmfplan::harness
