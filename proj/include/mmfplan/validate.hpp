// Solver-independent schedule checker.
//
// Re-derives the occupancy cells (request, link, mode, slot) from a
// schedule and tests each constraint family on them directly. Nothing here
// reuses the solvers' feasibility bookkeeping.

#ifndef MMFPLAN_VALIDATE_HPP_
#define MMFPLAN_VALIDATE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mmfplan/instance_io.hpp"
#include "mmfplan/model.hpp"
#include "mmfplan/schedule.hpp"

namespace mmfplan::validate {

struct Violation {
  std::string family;  // "structural", "eq2" ... "eq11"
  std::string location;
  std::string message;
};

struct ViolationReport {
  std::vector<Violation> violations;

  bool pass() const { return violations.empty(); }
  std::size_t count(std::string_view family) const;
};

ViolationReport check_schedule(const Instance& instance,
                               const Schedule& schedule);

// Resolves a schedule document and checks it; unresolvable references are
// reported as structural violations.
ViolationReport check_document(const Instance& instance, const Json& doc);

double throughput_gbps(const Instance& instance, const Schedule& schedule);
std::int64_t resource_usage(const Schedule& schedule);

Json to_json(const ViolationReport& report);

}  // namespace mmfplan::validate

#endif  // MMFPLAN_VALIDATE_HPP_
