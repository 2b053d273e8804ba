// Small hand-built instances shared by the unit tests.

#ifndef MMFPLAN_TESTS_BUILDERS_HPP_
#define MMFPLAN_TESTS_BUILDERS_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "mmfplan/model.hpp"
#include "mmfplan/schedule.hpp"

namespace builders {

using namespace mmfplan;

// One link X->Y of `length_m`, the given modes of the reference table,
// 4 slots, two 5 Gb/s requests A and B from X to Y.
inline Instance shared_link(const std::vector<ModeIndex>& modes,
                            double length_m = 200.0) {
  Instance inst;
  const NodeIndex x = inst.topology.add_node("X", Tier::kEdge);
  const NodeIndex y = inst.topology.add_node("Y", Tier::kEdge);
  inst.topology.add_link(x, y, length_m);
  inst.mode_count = static_cast<int>(modes.size());
  inst.crosstalk = CrosstalkMatrix::reference_table().restricted(modes);
  inst.requests = {Request{"A", x, y, 5.0}, Request{"B", x, y, 5.0}};
  inst.validate();
  return inst;
}

// A chain X -> Y -> Z with 100 m links and all four reference modes.
inline Instance chain(int requests = 0) {
  Instance inst;
  const NodeIndex x = inst.topology.add_node("X", Tier::kEdge);
  const NodeIndex y = inst.topology.add_node("Y", Tier::kAggregation);
  const NodeIndex z = inst.topology.add_node("Z", Tier::kEdge);
  inst.topology.add_link(x, y, 100.0);
  inst.topology.add_link(y, z, 100.0);
  inst.mode_count = 4;
  inst.crosstalk = CrosstalkMatrix::reference_table();
  for (int i = 0; i < requests; ++i) {
    inst.requests.push_back(Request{std::string(1, static_cast<char>('A' + i)), x, z, std::min(10.0, 2.0 * (i + 1))});
  }
  inst.validate();
  return inst;
}

inline Assignment place(RequestIndex r, std::vector<LinkIndex> path,
                        std::vector<ModeIndex> modes, int t0, int t1) {
  return Assignment{r, std::move(path), std::move(modes), t0, t1};
}

inline Schedule schedule_of(const Instance& inst, std::vector<Assignment> accepted) {
  Schedule s;
  s.accepted = std::move(accepted);
  for (RequestIndex r = 0; r < inst.requests.size(); ++r) {
    bool in = false;
    for (const auto& a : s.accepted) in = in || a.request == r;
    if (!in) s.rejected.push_back(r);
  }
  s.refresh_objective(inst);
  return s;
}

}  // namespace builders

#endif  // MMFPLAN_TESTS_BUILDERS_HPP_
