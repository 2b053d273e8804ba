// Single-field mutations of a schedule, and a second feasibility verdict
// taken from the planning model's constraint rows.

#ifndef MMFPLAN_TESTS_MUTATE_HPP_
#define MMFPLAN_TESTS_MUTATE_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "mmfplan/milp.hpp"
#include "mmfplan/model.hpp"
#include "mmfplan/schedule.hpp"

namespace mutate {

using namespace mmfplan;

struct Mutant {
  std::string what;
  Schedule schedule;
  bool must_fail = false;  // invalid whatever the instance
};

inline std::vector<Mutant> all_mutants(const Instance& inst, const Schedule& s) {
  std::vector<Mutant> out;
  const int slots = inst.slot_count();
  for (std::size_t i = 0; i < s.accepted.size(); ++i) {
    const Assignment& a = s.accepted[i];
    const std::string tag = "accepted[" + std::to_string(i) + "] ";
    auto with = [&](std::string what, bool must, auto&& edit) {
      Schedule m = s;
      edit(m.accepted[i]);
      out.push_back(Mutant{tag + what, std::move(m), must});
    };
    for (std::size_t k = 0; k < a.path.size(); ++k) {
      with("drop link " + std::to_string(k), true,
           [&](Assignment& x) { x.path.erase(x.path.begin() + k); });
    }
    with("shrink interval", true, [](Assignment& x) { --x.slot_end; });
    with("shift out of frame", true, [&](Assignment& x) {
      const int len = x.slot_len();
      x.slot_start = slots - len + 1;
      x.slot_end = x.slot_start + len;
    });
    if (a.slot_end < slots) {
      with("shift later", false, [](Assignment& x) { ++x.slot_start, ++x.slot_end; });
    }
    if (a.slot_start > 0) {
      with("shift earlier", false, [](Assignment& x) { --x.slot_start, --x.slot_end; });
    }
    for (std::size_t k = 0; k < a.modes.size(); ++k) {
      for (ModeIndex to = 0; to < inst.mode_count; ++to) {
        if (std::find(a.modes.begin(), a.modes.end(), to) != a.modes.end()) continue;
        // Guaranteed clash when another request holds `to` on a shared link
        // in an overlapping slot.
        bool clash = false;
        for (const Assignment& b : s.accepted) {
          if (b.request == a.request || !a.overlaps_in_time(b)) continue;
          if (std::find(b.modes.begin(), b.modes.end(), to) == b.modes.end()) continue;
          for (LinkIndex l : a.path)
            clash = clash || std::find(b.path.begin(), b.path.end(), l) != b.path.end();
        }
        with("swap mode " + std::to_string(a.modes[k]) + "->" + std::to_string(to), clash,
             [&](Assignment& x) {
               x.modes[k] = to;
               std::sort(x.modes.begin(), x.modes.end());
             });
      }
    }
  }
  return out;
}

// Feasibility according to the model rows; shapes the model cannot
// represent count as infeasible.
inline bool model_accepts(const milp::BuiltModel& built, const Instance& inst,
                          const Schedule& s) {
  for (const Assignment& a : s.accepted) {
    if (a.path.empty() || a.modes.empty() || a.slot_start >= a.slot_end) return false;
  }
  std::vector<double> x;
  try {
    x = milp::assignment_from_schedule(built, inst, s);
  } catch (const Error&) {
    return false;
  }
  return built.model.violated(x).empty();
}

}  // namespace mutate

#endif  // MMFPLAN_TESTS_MUTATE_HPP_
