#include "mmfplan/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace mmfplan {

namespace {

// Collects field-path problems instead of stopping at the first one.
class Reader {
 public:
  std::vector<std::string> problems;

  const Json* field(const Json& obj, const std::string& path,
                    const char* key, bool required) {
    if (!obj.is_object()) {
      problems.push_back(fmt::format("{}: expected an object", path));
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
      if (required) {
        problems.push_back(fmt::format("{}.{}: required", path, key));
      }
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const Json& obj, const std::string& path,
                               const char* key, bool required) {
    const Json* v = field(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      problems.push_back(fmt::format("{}.{}: expected a number", path, key));
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::string> string(const Json& obj, const std::string& path,
                                    const char* key, bool required) {
    const Json* v = field(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      problems.push_back(fmt::format("{}.{}: expected a string", path, key));
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  void throw_if_any() {
    if (!problems.empty()) throw ValidationError(std::move(problems));
  }
};

Topology read_topology(Reader& rd, const Json& doc, const std::string& path) {
  Topology topo;
  const Json* nodes = rd.field(doc, path, "nodes", true);
  if (nodes && !nodes->is_array()) {
    rd.problems.push_back(path + ".nodes: expected an array");
    nodes = nullptr;
  }
  if (nodes) {
    for (std::size_t i = 0; i < nodes->size(); ++i) {
      const std::string np = fmt::format("{}.nodes[{}]", path, i);
      auto id = rd.string((*nodes)[i], np, "id", true);
      auto tier = rd.string((*nodes)[i], np, "tier", false);
      Tier t = Tier::kOther;
      if (tier) {
        try {
          t = tier_from_string(*tier);
        } catch (const Error& e) {
          rd.problems.push_back(fmt::format("{}.tier: {}", np, e.what()));
        }
      }
      if (id) topo.add_node(*id, t);
    }
  }
  const Json* links = rd.field(doc, path, "links", true);
  if (links && !links->is_array()) {
    rd.problems.push_back(path + ".links: expected an array");
    links = nullptr;
  }
  if (links) {
    for (std::size_t i = 0; i < links->size(); ++i) {
      const std::string lp = fmt::format("{}.links[{}]", path, i);
      auto from = rd.string((*links)[i], lp, "from", true);
      auto to = rd.string((*links)[i], lp, "to", true);
      auto len = rd.number((*links)[i], lp, "length_m", true);
      if (!from || !to || !len) continue;
      auto f = topo.find_node(*from);
      auto t = topo.find_node(*to);
      if (!f) rd.problems.push_back(fmt::format("{}.from: unknown node '{}'", lp, *from));
      if (!t) rd.problems.push_back(fmt::format("{}.to: unknown node '{}'", lp, *to));
      if (f && t) topo.add_link(*f, *t, *len);
    }
  }
  return topo;
}

std::vector<Request> read_requests(Reader& rd, const Json& arr,
                                   const std::string& path,
                                   const Topology& topo) {
  std::vector<Request> out;
  if (!arr.is_array()) {
    rd.problems.push_back(path + ": expected an array");
    return out;
  }
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string rp = fmt::format("{}[{}]", path, i);
    auto id = rd.string(arr[i], rp, "id", true);
    auto src = rd.string(arr[i], rp, "src", true);
    auto dst = rd.string(arr[i], rp, "dst", true);
    auto bw = rd.number(arr[i], rp, "bandwidth_gbps", true);
    if (!id || !src || !dst || !bw) continue;
    auto s = topo.find_node(*src);
    auto d = topo.find_node(*dst);
    if (!s) rd.problems.push_back(fmt::format("{}.src: unknown node '{}' (request '{}')", rp, *src, *id));
    if (!d) rd.problems.push_back(fmt::format("{}.dst: unknown node '{}' (request '{}')", rp, *dst, *id));
    if (s && d) out.push_back(Request{*id, *s, *d, *bw});
  }
  return out;
}

void read_accumulation(Reader& rd, const Json& v, const std::string& path,
                       AccumulationModel& out) {
  std::string kind;
  if (v.is_string()) {
    kind = v.get<std::string>();
  } else if (v.is_object()) {
    auto k = rd.string(v, path, "kind", true);
    if (!k) return;
    kind = *k;
    if (auto h = rd.number(v, path, "h", false)) out.coupling_per_m = *h;
  } else {
    rd.problems.push_back(path + ": expected a string or object");
    return;
  }
  if (kind == "linear-power") {
    out.kind = AccumulationKind::kLinearPower;
  } else if (kind == "paper-literal-db") {
    out.kind = AccumulationKind::kLiteralDb;
  } else if (kind == "tanh" || kind == "tanh-coupling") {
    out.kind = AccumulationKind::kTanhCoupling;
  } else {
    rd.problems.push_back(fmt::format("{}: unknown accumulation model '{}'", path, kind));
  }
}

void read_objective(Reader& rd, const Json& v, const std::string& path,
                    ObjectiveMode& out) {
  std::string kind;
  if (v.is_string()) {
    kind = v.get<std::string>();
  } else if (v.is_object()) {
    auto k = rd.string(v, path, "kind", true);
    if (!k) return;
    kind = *k;
    out.eta1 = rd.number(v, path, "eta1", false);
    out.eta2 = rd.number(v, path, "eta2", false);
  } else {
    rd.problems.push_back(path + ": expected a string or object");
    return;
  }
  if (kind == "lexicographic") {
    out.kind = ObjectiveKind::kLexicographic;
  } else if (kind == "weighted") {
    out.kind = ObjectiveKind::kWeighted;
  } else {
    rd.problems.push_back(fmt::format("{}: unknown objective mode '{}'", path, kind));
  }
}

}  // namespace

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kParse,
                fmt::format("{}: parse error at byte {}: {}", source, e.byte,
                            e.what()));
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, fmt::format("cannot open '{}'", path.string()));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIo,
                fmt::format("cannot open '{}' for writing", path.string()));
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw Error(ErrorKind::kIo, fmt::format("write to '{}' failed", path.string()));
  }
}

Topology load_topology(const Json& topology_doc) {
  Reader rd;
  Topology topo = read_topology(rd, topology_doc, "topology");
  rd.throw_if_any();
  return topo;
}

std::vector<Request> load_requests(const Json& requests_doc,
                                   const Topology& topology) {
  Reader rd;
  auto out = read_requests(rd, requests_doc, "requests", topology);
  rd.throw_if_any();
  return out;
}

Instance load_instance(const Json& doc) {
  Reader rd;
  Instance inst;
  if (!doc.is_object()) {
    throw ValidationError({"<root>: expected an object"});
  }

  if (const Json* t = rd.field(doc, "", "topology", true)) {
    inst.topology = read_topology(rd, *t, "topology");
  }

  if (const Json* m = rd.field(doc, "", "modes", true)) {
    if (m->is_number_integer()) {
      inst.mode_count = m->get<int>();
    } else if (m->is_object()) {
      if (auto c = rd.number(*m, "modes", "count", true)) {
        inst.mode_count = static_cast<int>(*c);
      }
      if (const Json* labels = rd.field(*m, "modes", "labels", false)) {
        if (!labels->is_array()) {
          rd.problems.push_back("modes.labels: expected an array");
        } else {
          for (const auto& l : *labels) {
            if (l.is_string()) {
              inst.mode_labels.push_back(l.get<std::string>());
            } else {
              rd.problems.push_back("modes.labels: expected strings");
            }
          }
        }
      }
    } else {
      rd.problems.push_back("modes: expected an integer or object");
    }
  }

  auto xt_it = doc.find("crosstalk_db_per_100m");
  if (xt_it == doc.end() || xt_it->is_null()) {
    rd.problems.push_back("crosstalk_db_per_100m: crosstalk matrix required");
  } else if (!xt_it->is_array()) {
    rd.problems.push_back("crosstalk_db_per_100m: expected a square array");
  } else {
    const Json& rows = *xt_it;
    const int n = static_cast<int>(rows.size());
    std::vector<double> values(static_cast<std::size_t>(n) * n, 0.0);
    bool ok = true;
    for (int a = 0; a < n; ++a) {
      if (!rows[a].is_array() || static_cast<int>(rows[a].size()) != n) {
        rd.problems.push_back(fmt::format(
            "crosstalk_db_per_100m[{}]: expected a row of {} entries", a, n));
        ok = false;
        continue;
      }
      for (int v = 0; v < n; ++v) {
        const Json& cell = rows[a][v];
        if (a == v) {
          if (!cell.is_null()) {
            rd.problems.push_back(fmt::format(
                "crosstalk_db_per_100m[{}][{}]: diagonal must be null", a, v));
          }
          continue;
        }
        if (!cell.is_number()) {
          rd.problems.push_back(fmt::format(
              "crosstalk_db_per_100m[{}][{}]: expected a number", a, v));
          ok = false;
          continue;
        }
        values[static_cast<std::size_t>(a) * n + v] = cell.get<double>();
      }
    }
    if (ok) inst.crosstalk = CrosstalkMatrix(n, std::move(values));
  }

  if (const Json* f = rd.field(doc, "", "frame", true)) {
    if (auto v = rd.number(*f, "frame", "frame_ms", true)) inst.frame.frame_ms = *v;
    if (auto v = rd.number(*f, "frame", "slice_ms", true)) inst.frame.slice_ms = *v;
    inst.frame.guard_us = rd.number(*f, "frame", "guard_us", false);
  }

  if (const Json* p = rd.field(doc, "", "planner", false)) {
    PlannerConfig& pc = inst.planner;
    if (auto v = rd.number(*p, "planner", "xt_threshold_db", false)) pc.xt_threshold_db = *v;
    if (auto v = rd.number(*p, "planner", "link_capacity_gbps", false)) pc.link_capacity_gbps = *v;
    if (auto v = rd.number(*p, "planner", "granularity_gbps", false)) pc.granularity_gbps = *v;
    if (auto v = rd.number(*p, "planner", "big_m", false)) pc.big_m = static_cast<int>(*v);
    if (const Json* a = rd.field(*p, "planner", "accumulation_model", false)) {
      read_accumulation(rd, *a, "planner.accumulation_model", pc.accumulation);
    }
    if (const Json* o = rd.field(*p, "planner", "objective_mode", false)) {
      read_objective(rd, *o, "planner.objective_mode", pc.objective);
    }
  }

  if (const Json* r = rd.field(doc, "", "requests", false)) {
    inst.requests = read_requests(rd, *r, "requests", inst.topology);
  }

  rd.throw_if_any();
  inst.validate();
  return inst;
}

Instance load_instance_file(const std::filesystem::path& path) {
  return load_instance(read_json_file(path));
}

Json to_json(const Topology& topology) {
  Json nodes = Json::array();
  for (const Node& n : topology.nodes()) {
    nodes.push_back({{"id", n.id}, {"tier", std::string(to_string(n.tier))}});
  }
  Json links = Json::array();
  for (const Link& l : topology.links()) {
    links.push_back({{"from", topology.nodes()[l.from].id},
                     {"to", topology.nodes()[l.to].id},
                     {"length_m", l.length_m}});
  }
  return {{"nodes", nodes}, {"links", links}};
}

Json requests_to_json(const std::vector<Request>& requests,
                      const Topology& topology) {
  Json out = Json::array();
  for (const Request& r : requests) {
    out.push_back({{"id", r.id},
                   {"src", topology.nodes()[r.source].id},
                   {"dst", topology.nodes()[r.destination].id},
                   {"bandwidth_gbps", r.bandwidth_gbps}});
  }
  return out;
}

Json to_json(const Instance& inst) {
  Json doc;
  doc["topology"] = to_json(inst.topology);
  if (inst.mode_labels.empty()) {
    doc["modes"] = inst.mode_count;
  } else {
    doc["modes"] = {{"count", inst.mode_count}, {"labels", inst.mode_labels}};
  }
  Json rows = Json::array();
  for (int a = 0; a < inst.crosstalk.modes(); ++a) {
    Json row = Json::array();
    for (int v = 0; v < inst.crosstalk.modes(); ++v) {
      if (a == v) {
        row.push_back(nullptr);
      } else {
        row.push_back(inst.crosstalk.db_per_100m(a, v));
      }
    }
    rows.push_back(row);
  }
  doc["crosstalk_db_per_100m"] = rows;
  Json frame = {{"frame_ms", inst.frame.frame_ms},
                {"slice_ms", inst.frame.slice_ms}};
  if (inst.frame.guard_us) frame["guard_us"] = *inst.frame.guard_us;
  doc["frame"] = frame;

  const PlannerConfig& pc = inst.planner;
  Json planner = {{"xt_threshold_db", pc.xt_threshold_db},
                  {"link_capacity_gbps", pc.link_capacity_gbps},
                  {"granularity_gbps", pc.granularity_gbps}};
  if (pc.big_m) planner["big_m"] = *pc.big_m;
  if (pc.accumulation.kind == AccumulationKind::kTanhCoupling) {
    planner["accumulation_model"] = {{"kind", "tanh"},
                                     {"h", pc.accumulation.coupling_per_m}};
  } else {
    planner["accumulation_model"] = std::string(to_string(pc.accumulation.kind));
  }
  if (pc.objective.kind == ObjectiveKind::kWeighted) {
    Json obj = {{"kind", "weighted"}};
    if (pc.objective.eta1) obj["eta1"] = *pc.objective.eta1;
    if (pc.objective.eta2) obj["eta2"] = *pc.objective.eta2;
    planner["objective_mode"] = obj;
  } else {
    planner["objective_mode"] = "lexicographic";
  }
  doc["planner"] = planner;
  doc["requests"] = requests_to_json(inst.requests, inst.topology);
  return doc;
}

}  // namespace mmfplan
