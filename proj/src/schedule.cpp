#include "mmfplan/schedule.hpp"

#include <fmt/format.h>

namespace mmfplan {

const Assignment* Schedule::find(RequestIndex r) const {
  for (const Assignment& a : accepted) {
    if (a.request == r) return &a;
  }
  return nullptr;
}

void Schedule::refresh_objective(const Instance& instance) {
  throughput_gbps = 0.0;
  lambda_count = 0;
  for (const Assignment& a : accepted) {
    throughput_gbps += instance.requests[a.request].bandwidth_gbps;
    lambda_count += a.lambda_count();
  }
}

Json to_json(const Schedule& schedule, const Instance& instance) {
  const Topology& topo = instance.topology;
  Json accepted = Json::array();
  for (const Assignment& a : schedule.accepted) {
    Json path = Json::array();
    for (LinkIndex l : a.path) {
      path.push_back({{"from", topo.nodes()[topo.links()[l].from].id},
                      {"to", topo.nodes()[topo.links()[l].to].id}});
    }
    accepted.push_back({{"request_id", instance.requests[a.request].id},
                        {"path", path},
                        {"modes", a.modes},
                        {"slots", {{"start", a.slot_start}, {"end", a.slot_end}}}});
  }
  Json rejected = Json::array();
  for (RequestIndex r : schedule.rejected) {
    rejected.push_back(instance.requests[r].id);
  }
  return {{"accepted", accepted},
          {"rejected", rejected},
          {"throughput_gbps", schedule.throughput_gbps},
          {"lambda_count", schedule.lambda_count},
          {"optimal", schedule.optimal}};
}

namespace {

RequestIndex resolve_request(const Json& id, const Instance& instance,
                             const std::string& where,
                             std::vector<std::string>& problems) {
  if (!id.is_string()) {
    problems.push_back(where + ": expected a request id string");
    return 0;
  }
  auto r = instance.find_request(id.get<std::string>());
  if (!r) {
    problems.push_back(fmt::format("{}: unknown request '{}'", where,
                                   id.get<std::string>()));
    return 0;
  }
  return *r;
}

}  // namespace

Schedule schedule_from_json(const Json& doc, const Instance& instance) {
  std::vector<std::string> problems;
  Schedule out;
  if (!doc.is_object()) throw ValidationError({"schedule: expected an object"});
  const Topology& topo = instance.topology;

  if (auto it = doc.find("accepted"); it != doc.end() && it->is_array()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const Json& item = (*it)[i];
      const std::string where = fmt::format("accepted[{}]", i);
      if (!item.is_object()) {
        problems.push_back(where + ": expected an object");
        continue;
      }
      Assignment a;
      a.request = resolve_request(item.value("request_id", Json()), instance,
                                  where + ".request_id", problems);
      const Json path = item.value("path", Json());
      if (!path.is_array()) {
        problems.push_back(where + ".path: expected an array");
      } else {
        for (std::size_t k = 0; k < path.size(); ++k) {
          const Json& hop = path[k];
          const std::string hw = fmt::format("{}.path[{}]", where, k);
          if (!hop.is_object() || !hop.contains("from") || !hop.contains("to") ||
              !hop["from"].is_string() || !hop["to"].is_string()) {
            problems.push_back(hw + ": expected {from, to}");
            continue;
          }
          auto f = topo.find_node(hop["from"].get<std::string>());
          auto t = topo.find_node(hop["to"].get<std::string>());
          std::optional<LinkIndex> l;
          if (f && t) l = topo.find_link(*f, *t);
          if (!l) {
            problems.push_back(fmt::format("{}: no link {}->{}", hw,
                                           hop["from"].get<std::string>(),
                                           hop["to"].get<std::string>()));
            continue;
          }
          a.path.push_back(*l);
        }
      }
      const Json modes = item.value("modes", Json());
      if (!modes.is_array()) {
        problems.push_back(where + ".modes: expected an array");
      } else {
        for (const Json& m : modes) {
          if (!m.is_number_integer()) {
            problems.push_back(where + ".modes: expected integers");
            continue;
          }
          a.modes.push_back(m.get<int>());
        }
      }
      const Json slots = item.value("slots", Json());
      if (!slots.is_object() || !slots.contains("start") ||
          !slots.contains("end") || !slots["start"].is_number_integer() ||
          !slots["end"].is_number_integer()) {
        problems.push_back(where + ".slots: expected {start, end}");
      } else {
        a.slot_start = slots["start"].get<int>();
        a.slot_end = slots["end"].get<int>();
      }
      out.accepted.push_back(std::move(a));
    }
  } else {
    problems.push_back("accepted: expected an array");
  }

  if (auto it = doc.find("rejected"); it != doc.end() && it->is_array()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      out.rejected.push_back(resolve_request(
          (*it)[i], instance, fmt::format("rejected[{}]", i), problems));
    }
  } else if (it != doc.end()) {
    problems.push_back("rejected: expected an array");
  }

  out.throughput_gbps = doc.value("throughput_gbps", 0.0);
  out.lambda_count = doc.value("lambda_count", std::int64_t{0});
  out.optimal = doc.value("optimal", false);

  if (!problems.empty()) throw ValidationError(std::move(problems));
  return out;
}

}  // namespace mmfplan
