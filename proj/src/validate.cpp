#include "mmfplan/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "mmfplan/xtalk.hpp"

namespace mmfplan::validate {

namespace {

struct Cell {
  LinkIndex link;
  ModeIndex mode;
  int slot;

  auto operator<=>(const Cell&) const = default;
};

class Checker {
 public:
  Checker(const Instance& instance, const Schedule& schedule)
      : inst_(instance), sched_(schedule), topo_(instance.topology) {}

  ViolationReport run() {
    if (!structural()) return std::move(report_);
    derive_cells();
    for (const Assignment& a : sched_.accepted) {
      check_path(a);
      check_conservation(a);
      check_continuity(a);
      check_contiguity(a);
      check_capacity(a);
    }
    check_exclusivity();
    check_crosstalk();
    return std::move(report_);
  }

 private:
  void add(std::string family, std::string location, std::string message) {
    report_.violations.push_back(
        Violation{std::move(family), std::move(location), std::move(message)});
  }

  std::string rid(RequestIndex r) const { return inst_.requests[r].id; }

  bool structural() {
    const int slots = inst_.slot_count();
    std::vector<int> seen(inst_.requests.size(), 0);
    for (std::size_t i = 0; i < sched_.accepted.size(); ++i) {
      const Assignment& a = sched_.accepted[i];
      const std::string where = fmt::format("accepted[{}]", i);
      if (a.request >= inst_.requests.size()) {
        add("structural", where, "unknown request");
        continue;
      }
      if (seen[a.request]++) {
        add("structural", where, fmt::format("request '{}' listed twice", rid(a.request)));
      }
      if (a.path.empty()) add("structural", where, "empty path");
      for (LinkIndex l : a.path) {
        if (l >= topo_.link_count()) add("structural", where, "unknown link");
      }
      if (a.modes.empty()) add("structural", where, "no modes");
      std::set<ModeIndex> uniq;
      for (ModeIndex m : a.modes) {
        if (m < 0 || m >= inst_.mode_count) {
          add("structural", where, fmt::format("mode {} out of range", m));
        } else if (!uniq.insert(m).second) {
          add("structural", where, fmt::format("mode {} listed twice", m));
        }
      }
      if (a.slot_start < 0 || a.slot_end > slots || a.slot_start >= a.slot_end) {
        add("structural", where,
            fmt::format("slot interval [{}, {}) outside frame of {} slots",
                        a.slot_start, a.slot_end, slots));
      }
    }
    for (std::size_t i = 0; i < sched_.rejected.size(); ++i) {
      const RequestIndex r = sched_.rejected[i];
      const std::string where = fmt::format("rejected[{}]", i);
      if (r >= inst_.requests.size()) {
        add("structural", where, "unknown request");
      } else if (seen[r]++) {
        add("structural", where, fmt::format("request '{}' listed twice", rid(r)));
      }
    }
    return report_.pass();
  }

  void derive_cells() {
    for (const Assignment& a : sched_.accepted) {
      auto& cells = cells_[a.request];
      for (LinkIndex l : a.path) {
        for (ModeIndex m : a.modes) {
          for (int t = a.slot_start; t < a.slot_end; ++t) {
            cells.insert(Cell{l, m, t});
          }
        }
      }
    }
  }

  // The ordered path must be a simple chain from source to destination.
  void check_path(const Assignment& a) {
    const Request& req = inst_.requests[a.request];
    const std::string where = fmt::format("request '{}'", rid(a.request));
    NodeIndex at = req.source;
    std::set<NodeIndex> visited{at};
    for (std::size_t k = 0; k < a.path.size(); ++k) {
      const Link& link = topo_.links()[a.path[k]];
      if (link.from != at) {
        add("eq2", fmt::format("{} hop {}", where, k),
            fmt::format("path broken: hop starts at '{}', expected '{}'",
                        topo_.nodes()[link.from].id, topo_.nodes()[at].id));
        return;
      }
      at = link.to;
      if (!visited.insert(at).second) {
        add("eq2", fmt::format("{} hop {}", where, k),
            fmt::format("path revisits node '{}'", topo_.nodes()[at].id));
        return;
      }
    }
    if (at != req.destination) {
      add("eq2", where,
          fmt::format("path ends at '{}', destination is '{}'",
                      topo_.nodes()[at].id, topo_.nodes()[req.destination].id));
    }
  }

  // Net outflow of occupancy cells: q_r (or more) at the source, the
  // negation at the destination, zero elsewhere.
  void check_conservation(const Assignment& a) {
    const Request& req = inst_.requests[a.request];
    std::vector<long> net(topo_.node_count(), 0);
    for (const Cell& c : cells_[a.request]) {
      ++net[topo_.links()[c.link].from];
      --net[topo_.links()[c.link].to];
    }
    const long q = inst_.slot_units(a.request);
    for (NodeIndex n = 0; n < topo_.node_count(); ++n) {
      const std::string where =
          fmt::format("request '{}' node '{}'", rid(a.request), topo_.nodes()[n].id);
      if (n == req.source) {
        if (net[n] < q) {
          add("eq2", where, fmt::format("source outflow {} below {} slot units", net[n], q));
        }
      } else if (n == req.destination) {
        if (net[n] != -net[req.source]) {
          add("eq2", where,
              fmt::format("destination inflow {} differs from source outflow {}",
                          -net[n], net[req.source]));
        }
      } else if (net[n] != 0) {
        add("eq2", where, fmt::format("transit imbalance {}", net[n]));
      }
    }
  }

  // Per-slot aggregate (eq3/eq4) and per-(mode, slot) (eq5/eq6) balance.
  void check_continuity(const Assignment& a) {
    const Request& req = inst_.requests[a.request];
    std::map<std::pair<NodeIndex, int>, long> slot_out, slot_in;
    std::map<std::tuple<NodeIndex, ModeIndex, int>, long> mode_out, mode_in;
    for (const Cell& c : cells_[a.request]) {
      const Link& link = topo_.links()[c.link];
      ++slot_out[{link.from, c.slot}];
      ++slot_in[{link.to, c.slot}];
      ++mode_out[{link.from, c.mode, c.slot}];
      ++mode_in[{link.to, c.mode, c.slot}];
    }
    auto get2 = [](const auto& m, NodeIndex n, int t) {
      auto it = m.find({n, t});
      return it == m.end() ? 0L : it->second;
    };
    auto get3 = [](const auto& m, NodeIndex n, ModeIndex md, int t) {
      auto it = m.find({n, md, t});
      return it == m.end() ? 0L : it->second;
    };
    const int slots = inst_.slot_count();
    for (int t = 0; t < slots; ++t) {
      if (get2(slot_out, req.source, t) != get2(slot_in, req.destination, t)) {
        add("eq3", fmt::format("request '{}' slot {}", rid(a.request), t),
            "slot use differs between source and destination");
      }
      for (int m = 0; m < inst_.mode_count; ++m) {
        if (get3(mode_out, req.source, m, t) != get3(mode_in, req.destination, m, t)) {
          add("eq5", fmt::format("request '{}' mode {} slot {}", rid(a.request), m, t),
              "mode use differs between source and destination");
        }
      }
      for (NodeIndex n = 0; n < topo_.node_count(); ++n) {
        if (n == req.source || n == req.destination) continue;
        if (get2(slot_out, n, t) != get2(slot_in, n, t)) {
          add("eq4",
              fmt::format("request '{}' node '{}' slot {}", rid(a.request),
                          topo_.nodes()[n].id, t),
              "slot continuity broken at transit node");
        }
        for (int m = 0; m < inst_.mode_count; ++m) {
          if (get3(mode_out, n, m, t) != get3(mode_in, n, m, t)) {
            add("eq6",
                fmt::format("request '{}' node '{}' mode {} slot {}",
                            rid(a.request), topo_.nodes()[n].id, m, t),
                "mode continuity broken at transit node");
          }
        }
      }
    }
  }

  // eq8: one contiguous block per (link, mode); eq9: identical slot pattern
  // on every mode used on a link.
  void check_contiguity(const Assignment& a) {
    const int slots = inst_.slot_count();
    std::map<LinkIndex, std::map<ModeIndex, std::vector<char>>> pattern;
    for (const Cell& c : cells_[a.request]) {
      auto& row = pattern[c.link][c.mode];
      if (row.empty()) row.assign(slots, 0);
      row[c.slot] = 1;
    }
    for (const auto& [link, rows] : pattern) {
      const std::vector<char>* reference = nullptr;
      for (const auto& [mode, row] : rows) {
        int transitions = 0;
        char prev = 0;
        for (int t = 0; t <= slots; ++t) {
          const char cur = t < slots ? row[t] : 0;
          transitions += cur != prev;
          prev = cur;
        }
        if (transitions > 2) {
          add("eq8",
              fmt::format("request '{}' link {} mode {}", rid(a.request),
                          topo_.link_name(link), mode),
              fmt::format("{} occupancy transitions, at most 2 allowed", transitions));
        }
        if (!reference) {
          reference = &row;
        } else if (*reference != row) {
          add("eq9",
              fmt::format("request '{}' link {} mode {}", rid(a.request),
                          topo_.link_name(link), mode),
              "slot pattern differs from the request's other modes");
        }
      }
    }
  }

  void check_capacity(const Assignment& a) {
    std::map<LinkIndex, long> used;
    for (const Cell& c : cells_[a.request]) ++used[c.link];
    const long q = inst_.slot_units(a.request);
    for (const auto& [link, n] : used) {
      if (n < q) {
        add("eq10",
            fmt::format("request '{}' link {}", rid(a.request), topo_.link_name(link)),
            fmt::format("{} slot units supplied, {} required", n, q));
      }
    }
  }

  void check_exclusivity() {
    std::map<Cell, std::vector<RequestIndex>> owners;
    for (const auto& [r, cells] : cells_) {
      for (const Cell& c : cells) owners[c].push_back(r);
    }
    for (const auto& [c, rs] : owners) {
      if (rs.size() < 2) continue;
      std::string who;
      for (RequestIndex r : rs) who += (who.empty() ? "'" : ", '") + rid(r) + "'";
      add("eq7",
          fmt::format("link {} mode {} slot {}", topo_.link_name(c.link), c.mode, c.slot),
          fmt::format("cell used by {} requests: {}", rs.size(), who));
    }
  }

  void check_crosstalk() {
    for (const Assignment& a : sched_.accepted) {
      const auto report = xtalk::accumulate_for_request(a.request, sched_, inst_);
      if (!report.feasible) {
        add("eq11", fmt::format("request '{}'", rid(a.request)),
            fmt::format("accumulated crosstalk {:.2f} dB exceeds {:.2f} dB",
                        report.total_db, inst_.planner.xt_threshold_db));
      }
    }
  }

  const Instance& inst_;
  const Schedule& sched_;
  const Topology& topo_;
  std::map<RequestIndex, std::set<Cell>> cells_;
  ViolationReport report_;
};

}  // namespace

std::size_t ViolationReport::count(std::string_view family) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(),
                    [&](const Violation& v) { return v.family == family; }));
}

ViolationReport check_schedule(const Instance& instance,
                               const Schedule& schedule) {
  return Checker(instance, schedule).run();
}

ViolationReport check_document(const Instance& instance, const Json& doc) {
  Schedule schedule;
  try {
    schedule = schedule_from_json(doc, instance);
  } catch (const ValidationError& e) {
    ViolationReport report;
    for (const auto& p : e.problems()) {
      report.violations.push_back(Violation{"structural", "", p});
    }
    return report;
  }
  return check_schedule(instance, schedule);
}

double throughput_gbps(const Instance& instance, const Schedule& schedule) {
  double total = 0.0;
  for (const Assignment& a : schedule.accepted) {
    total += instance.requests[a.request].bandwidth_gbps;
  }
  return total;
}

std::int64_t resource_usage(const Schedule& schedule) {
  std::int64_t cells = 0;
  for (const Assignment& a : schedule.accepted) {
    for (std::size_t k = 0; k < a.path.size(); ++k) {
      for (std::size_t m = 0; m < a.modes.size(); ++m) {
        for (int t = a.slot_start; t < a.slot_end; ++t) ++cells;
      }
    }
  }
  return cells;
}

Json to_json(const ViolationReport& report) {
  Json list = Json::array();
  for (const Violation& v : report.violations) {
    list.push_back({{"family", v.family},
                    {"location", v.location},
                    {"message", v.message}});
  }
  return {{"pass", report.pass()}, {"violations", list}};
}

}  // namespace mmfplan::validate
