// Schedulers: exact branch-and-bound, greedy, and the conventional
// (no time slicing) baseline.
//
// All three search over per-request candidate assignments (path, mode set,
// contiguous slot interval), so continuity and contiguity hold by
// construction and the search only has to resolve slot conflicts and
// crosstalk.

#ifndef MMFPLAN_SOLVE_HPP_
#define MMFPLAN_SOLVE_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "mmfplan/model.hpp"
#include "mmfplan/paths.hpp"
#include "mmfplan/schedule.hpp"

namespace mmfplan::solve {

enum class ModeSubsets {
  kContiguous,  // runs of consecutive mode indices
  kAll,         // every non-empty subset
};

struct Candidate {
  int path_rank = 0;
  Path path;
  std::vector<ModeIndex> modes;
  int slot_start = 0;
  int slot_end = 0;

  int supply() const {
    return static_cast<int>(modes.size()) * (slot_end - slot_start);
  }
  std::int64_t lambda_count() const {
    return static_cast<std::int64_t>(path.links.size()) * supply();
  }
};

struct SolveLimits {
  std::int64_t node_budget = 1'000'000;
  double wall_clock_s = 600.0;
  int k_paths = 4;
  ModeSubsets mode_subsets = ModeSubsets::kContiguous;
};

// Every (path, mode subset, interval) with supply >= q_r and
// supply - q_r < min(|modes|, |interval|), for the k shortest paths.
// Ordered by (supply, path length, path rank, slot start, modes).
std::vector<Candidate> enumerate_candidates(const Instance& instance,
                                            RequestIndex request, int k,
                                            ModeSubsets subsets);

// Depth-first branch-and-bound. Lexicographic (max throughput, then min
// lambda count) unless the instance asks for the weighted objective. When
// `warm_start` is a feasible schedule it seeds the incumbent. On budget
// exhaustion the best schedule found is returned with optimal = false.
Schedule solve_exact(const Instance& instance, const SolveLimits& limits,
                     const Schedule* warm_start = nullptr);

enum class OrderPolicy {
  kBandwidthDesc,  // descending bandwidth, ties by request id
  kInputOrder,
};

// Each request takes its first feasible candidate; deterministic.
Schedule solve_greedy(const Instance& instance, const SolveLimits& limits,
                      OrderPolicy order = OrderPolicy::kBandwidthDesc);

// Conventional MDM: every accepted request holds its modes for the whole
// frame. Solves the single-slot collapse of `instance` (exact, with greedy
// fallback past the limits); the schedule refers to that collapsed instance.
Schedule solve_baseline_conventional(const Instance& instance,
                                     const SolveLimits& limits);

// Re-expresses a single-slot schedule on the sliced frame of `instance`,
// keeping each path and mode set and shrinking the interval to the
// shortest prefix [0, ceil(q_r / |modes|)).
Schedule lift_single_slot_schedule(const Schedule& single_slot,
                                   const Instance& instance);

// Weighted-objective weights (explicit or defaulted).
struct Weights {
  double eta1 = 1.0;
  double eta2 = 0.0;
};
Weights objective_weights(const Instance& instance);

}  // namespace mmfplan::solve

#endif  // MMFPLAN_SOLVE_HPP_
