#include "mmfplan/timeline.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace mmfplan {

char request_letter(RequestIndex r) {
  return r < 26 ? static_cast<char>('A' + r) : '#';
}

namespace {

std::string row_label(const Instance& inst, ModeIndex m) {
  std::string label = fmt::format("m{}", m + 1);
  if (!inst.mode_labels.empty()) label += "/" + inst.mode_label(m);
  return label;
}

std::string render_link(const Instance& inst, const Schedule& schedule,
                        LinkIndex link) {
  const int slots = inst.slot_count();
  std::vector<std::string> grid(inst.mode_count, std::string(slots, '.'));
  std::set<RequestIndex> shown;
  for (const Assignment& a : schedule.accepted) {
    if (std::find(a.path.begin(), a.path.end(), link) == a.path.end()) continue;
    for (ModeIndex m : a.modes) {
      if (m < 0 || m >= inst.mode_count) continue;
      for (int t = std::max(0, a.slot_start); t < std::min(slots, a.slot_end); ++t) {
        grid[m][t] = request_letter(a.request);
      }
    }
    shown.insert(a.request);
  }

  std::size_t width = 0;
  for (ModeIndex m = 0; m < inst.mode_count; ++m) {
    width = std::max(width, row_label(inst, m).size());
  }
  const bool guard = inst.frame.guard_us.has_value();

  std::string out = fmt::format("{} ({} slots x {} ms", inst.topology.link_name(link),
                                slots, inst.frame.slice_ms);
  if (guard) out += fmt::format(", {} us guard", *inst.frame.guard_us);
  out += ")\n";
  for (ModeIndex m = 0; m < inst.mode_count; ++m) {
    std::string cells;
    for (int t = 0; t < slots; ++t) {
      if (guard && t > 0) cells += '|';
      cells += grid[m][t];
    }
    out += fmt::format("{:<{}}  {}\n", row_label(inst, m), width, cells);
  }
  for (RequestIndex r : shown) {
    out += fmt::format("  {} = {}\n", request_letter(r), inst.requests[r].id);
  }
  return out;
}

}  // namespace

std::string render_timeline(const Instance& instance, const Schedule& schedule,
                            std::optional<LinkIndex> link) {
  if (link) return render_link(instance, schedule, *link);
  std::set<LinkIndex> used;
  for (const Assignment& a : schedule.accepted) used.insert(a.path.begin(), a.path.end());
  std::string out;
  for (LinkIndex l : used) {
    if (l >= instance.topology.link_count()) continue;
    if (!out.empty()) out += '\n';
    out += render_link(instance, schedule, l);
  }
  if (out.empty()) out = "no accepted requests\n";
  return out;
}

}  // namespace mmfplan
