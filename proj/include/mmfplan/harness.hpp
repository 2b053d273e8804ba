// Traffic generation, bundled fixtures and load sweeps comparing sliced
// scheduling against conventional MDM.

#ifndef MMFPLAN_HARNESS_HPP_
#define MMFPLAN_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mmfplan/instance_io.hpp"
#include "mmfplan/model.hpp"
#include "mmfplan/schedule.hpp"
#include "mmfplan/solve.hpp"

namespace mmfplan::harness {

// Requests between uniformly drawn ordered pairs of edge-tier nodes, with
// bandwidth uniform on {g, 2g, ..., C}, until the offered load is reached.
// The last request is trimmed so the total equals `load_gbps` exactly.
// Load 0 gives no requests. Throws kInvalidTopology with fewer than two edge
// nodes and kInvalidParameter for a negative load or one that is not a
// multiple of the granularity.
std::vector<Request> gen_uniform_traffic(const Topology& topology,
                                         double load_gbps,
                                         double granularity_gbps,
                                         std::uint64_t seed,
                                         double capacity_gbps = 10.0);

inline constexpr std::string_view kBandwidthLaw =
    "uniform on {g, 2g, ..., C} Gb/s, last request trimmed to the offered load";

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t cell_seed(std::uint64_t master, std::size_t load_index,
                        std::size_t trial);
// FNV-1a over the text.
std::uint64_t fnv1a64(std::string_view text);

// Capacity across the edge-tier cut: half of the edge switches, times their
// uplinks, times |M| * C.
double bisection_capacity_gbps(const Instance& instance);

// Fat tree 4 edge / 2 aggregation / 2 core, 100 m links, 4 modes with the
// reference coupling table, 20 ms frame in 5 ms slices. No requests.
Instance fig2_instance();

// Five links into and out of one aggregation switch A1; link c is
// A1 -> C1, 500 m. Seven 2.5 Gb/s requests A..G all cross link c.
// Modes are labelled LP01, LP11, LP02, LP31; 50 us guard for display.
Instance fig4_instance();
// A on m1 in slot 0, B and C on m1 in slots 1 and 2, G on m4 in slot 0,
// D on m2 in slot 3; E and F rejected.
Schedule fig4_schedule(const Instance& fig4);

// One link E1 -> E2, 2 modes, 2 slots, requests A (5 Gb/s) and B (10 Gb/s).
Instance tiny_instance();

Instance fixture(std::string_view name);  // "fig2" | "fig4" | "tiny"

enum class SolverKind { kExact, kGreedy, kBaseline };
std::string_view to_string(SolverKind kind);
SolverKind solver_from_string(std::string_view s);

struct SweepConfig {
  std::vector<double> loads_gbps;
  std::vector<SolverKind> solvers;
  int trials = 1;
  std::uint64_t seed = 1;
  solve::SolveLimits limits;
};

struct SweepRow {
  double load_gbps = 0.0;
  int trial = 0;
  SolverKind solver = SolverKind::kExact;
  double throughput_gbps = 0.0;
  double acceptance_ratio = 0.0;
  std::int64_t lambda_count = 0;
  double solve_ms = 0.0;
  bool optimal = false;
};

struct SweepMean {
  double load_gbps = 0.0;
  SolverKind solver = SolverKind::kExact;
  double throughput_gbps = 0.0;
  double acceptance_ratio = 0.0;
  int trials = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::uint64_t seed = 0;
  std::uint64_t digest = 0;

  std::vector<SweepMean> means() const;
  std::string to_csv() const;
  Json metadata(const SweepConfig& config) const;
};

// Solves one instance. The exact solver is seeded with the better of the
// greedy schedule and the lifted baseline, so it never reports less than
// either. Baseline schedules refer to the single-slot collapse.
Schedule run_solver(const Instance& instance, SolverKind kind,
                    const solve::SolveLimits& limits);

// Each (load, trial) cell draws traffic from cell_seed(seed, load, trial)
// and runs every solver on the same requests.
SweepResult run_sweep(const Instance& instance_template,
                      const SweepConfig& config);

}  // namespace mmfplan::harness

#endif  // MMFPLAN_HARNESS_HPP_
