// Schedules in path / mode-set / slot-interval form.
//
// An accepted request occupies every (link, mode, slot) cell in
// path x modes x [slot_start, slot_end). That form makes slot continuity,
// mode continuity and contiguity hold by construction; the occupancy cells
// are the lambda variables of the planning model.

#ifndef MMFPLAN_SCHEDULE_HPP_
#define MMFPLAN_SCHEDULE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mmfplan/instance_io.hpp"
#include "mmfplan/model.hpp"

namespace mmfplan {

struct Assignment {
  RequestIndex request = 0;
  std::vector<LinkIndex> path;   // ordered source -> destination
  std::vector<ModeIndex> modes;  // ascending
  int slot_start = 0;
  int slot_end = 0;  // exclusive

  int slot_len() const { return slot_end - slot_start; }
  int supply() const { return static_cast<int>(modes.size()) * slot_len(); }
  std::int64_t lambda_count() const {
    return static_cast<std::int64_t>(path.size()) * supply();
  }
  bool overlaps_in_time(const Assignment& o) const {
    return slot_start < o.slot_end && o.slot_start < slot_end;
  }

  bool operator==(const Assignment&) const = default;
};

struct Schedule {
  std::vector<Assignment> accepted;
  std::vector<RequestIndex> rejected;
  double throughput_gbps = 0.0;
  std::int64_t lambda_count = 0;
  bool optimal = false;

  const Assignment* find(RequestIndex r) const;
  // Recomputes throughput_gbps and lambda_count from the assignments.
  void refresh_objective(const Instance& instance);

  bool operator==(const Schedule&) const = default;
};

// {accepted: [{request_id, path: [{from, to}], modes, slots: {start, end}}],
//  rejected: [ids], throughput_gbps, lambda_count, optimal}
Json to_json(const Schedule& schedule, const Instance& instance);

// Resolves ids against `instance`. Unknown requests, nodes or links raise
// kValidation errors (structural problems); range checks are left to the
// validator.
Schedule schedule_from_json(const Json& doc, const Instance& instance);

}  // namespace mmfplan

#endif  // MMFPLAN_SCHEDULE_HPP_
