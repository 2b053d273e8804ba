#include "mmfplan/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace mmfplan {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter: return "invalid-parameter";
    case ErrorKind::kParse: return "parse-error";
    case ErrorKind::kValidation: return "validation-error";
    case ErrorKind::kNotScheduled: return "not-scheduled";
    case ErrorKind::kSizeLimit: return "size-limit";
    case ErrorKind::kInvalidPair: return "invalid-pair";
    case ErrorKind::kInvalidTopology: return "invalid-topology";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "validation failed:";
  for (const auto& p : problems) {
    out += "\n  ";
    out += p;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(ErrorKind::kValidation, join_problems(problems)),
      problems_(std::move(problems)) {}

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::kEdge: return "edge";
    case Tier::kAggregation: return "aggregation";
    case Tier::kCore: return "core";
    case Tier::kOther: return "other";
  }
  return "other";
}

Tier tier_from_string(std::string_view s) {
  if (s == "edge") return Tier::kEdge;
  if (s == "aggregation" || s == "agg") return Tier::kAggregation;
  if (s == "core") return Tier::kCore;
  if (s == "other") return Tier::kOther;
  throw Error(ErrorKind::kParse, fmt::format("unknown tier '{}'", s));
}

NodeIndex Topology::add_node(std::string id, Tier tier) {
  nodes_.push_back(Node{std::move(id), tier});
  out_.emplace_back();
  return nodes_.size() - 1;
}

LinkIndex Topology::add_link(NodeIndex from, NodeIndex to, double length_m) {
  links_.push_back(Link{from, to, length_m});
  out_[from].push_back(links_.size() - 1);
  return links_.size() - 1;
}

void Topology::add_fiber(NodeIndex a, NodeIndex b, double length_m) {
  add_link(a, b, length_m);
  add_link(b, a, length_m);
}

std::optional<NodeIndex> Topology::find_node(std::string_view id) const {
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<LinkIndex> Topology::find_link(NodeIndex from,
                                             NodeIndex to) const {
  if (from >= out_.size()) return std::nullopt;
  for (LinkIndex l : out_[from]) {
    if (links_[l].to == to) return l;
  }
  return std::nullopt;
}

std::vector<NodeIndex> Topology::nodes_in_tier(Tier tier) const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].tier == tier) out.push_back(i);
  }
  return out;
}

std::string Topology::link_name(LinkIndex l) const {
  const Link& link = links_[l];
  return fmt::format("{}->{}", nodes_[link.from].id, nodes_[link.to].id);
}

int FrameConfig::slot_count() const {
  if (!(frame_ms > 0.0) || !(slice_ms > 0.0)) {
    throw Error(ErrorKind::kInvalidParameter,
                "frame_ms and slice_ms must be positive");
  }
  const double ratio = frame_ms / slice_ms;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorKind::kInvalidParameter,
                fmt::format("slice_ms {} does not divide frame_ms {}",
                            slice_ms, frame_ms));
  }
  return static_cast<int>(rounded);
}

CrosstalkMatrix::CrosstalkMatrix(int modes)
    : modes_(modes), values_(static_cast<std::size_t>(modes) * modes, 0.0) {}

CrosstalkMatrix::CrosstalkMatrix(int modes, std::vector<double> row_major)
    : modes_(modes), values_(std::move(row_major)) {
  if (values_.size() != static_cast<std::size_t>(modes) * modes) {
    throw Error(ErrorKind::kInvalidParameter,
                "crosstalk matrix size does not match mode count");
  }
  for (int m = 0; m < modes_; ++m) {
    values_[m * modes_ + m] = 0.0;
  }
}

CrosstalkMatrix CrosstalkMatrix::reference_table() {
  // clang-format off
  return CrosstalkMatrix(4, {
      0.0,   -26.0, -21.2, -43.0,
      -17.7, 0.0,   -15.8, -19.7,
      -19.5, -14.3, 0.0,   -15.6,
      -21.5, -16.7, -17.5, 0.0,
  });
  // clang-format on
}

double CrosstalkMatrix::db_per_100m(ModeIndex aggressor, ModeIndex victim) const {
  return values_[static_cast<std::size_t>(aggressor) * modes_ + victim];
}

void CrosstalkMatrix::set(ModeIndex aggressor, ModeIndex victim, double db) {
  values_[static_cast<std::size_t>(aggressor) * modes_ + victim] = db;
}

double CrosstalkMatrix::strongest_db() const {
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < modes_; ++a) {
    for (int v = 0; v < modes_; ++v) {
      if (a != v) best = std::max(best, db_per_100m(a, v));
    }
  }
  return best;
}

CrosstalkMatrix CrosstalkMatrix::restricted(
    const std::vector<ModeIndex>& keep) const {
  CrosstalkMatrix out(static_cast<int>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a) {
    for (std::size_t v = 0; v < keep.size(); ++v) {
      if (a != v) {
        out.set(static_cast<int>(a), static_cast<int>(v),
                db_per_100m(keep[a], keep[v]));
      }
    }
  }
  return out;
}

std::string_view to_string(AccumulationKind kind) {
  switch (kind) {
    case AccumulationKind::kLinearPower: return "linear-power";
    case AccumulationKind::kLiteralDb: return "paper-literal-db";
    case AccumulationKind::kTanhCoupling: return "tanh";
  }
  return "linear-power";
}

double slot_capacity_gbps(const FrameConfig& frame,
                          const PlannerConfig& config) {
  return config.link_capacity_gbps * frame.slice_ms / frame.frame_ms;
}

int required_slot_units(double bandwidth_gbps, double slot_capacity_gbps) {
  if (!(bandwidth_gbps > 0.0) || !(slot_capacity_gbps > 0.0)) {
    throw Error(ErrorKind::kInvalidParameter,
                "bandwidth and slot capacity must be positive");
  }
  const double ratio = bandwidth_gbps / slot_capacity_gbps;
  return static_cast<int>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
}

double Instance::slot_capacity_gbps() const {
  return mmfplan::slot_capacity_gbps(frame, planner);
}

int Instance::slot_units(RequestIndex r) const {
  return required_slot_units(requests[r].bandwidth_gbps, slot_capacity_gbps());
}

std::string Instance::mode_label(ModeIndex m) const {
  if (static_cast<std::size_t>(m) < mode_labels.size()) return mode_labels[m];
  return fmt::format("m{}", m + 1);
}

std::optional<RequestIndex> Instance::find_request(std::string_view id) const {
  for (RequestIndex r = 0; r < requests.size(); ++r) {
    if (requests[r].id == id) return r;
  }
  return std::nullopt;
}

namespace {

bool is_multiple_of(double value, double step) {
  const double k = value / step;
  return std::abs(k - std::round(k)) <= 1e-6 * std::max(1.0, k);
}

}  // namespace

void Instance::validate() const {
  std::vector<std::string> problems;
  const auto& nodes = topology.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) {
      problems.push_back(fmt::format("topology.nodes[{}].id: empty", i));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (nodes[j].id == nodes[i].id) {
        problems.push_back(fmt::format(
            "topology.nodes[{}].id: duplicate node id '{}'", i, nodes[i].id));
      }
    }
  }
  const auto& links = topology.links();
  for (std::size_t l = 0; l < links.size(); ++l) {
    if (links[l].from == links[l].to) {
      problems.push_back(fmt::format("topology.links[{}]: self-loop at '{}'", l,
                                     nodes[links[l].from].id));
    }
    if (!(links[l].length_m > 0.0) || !std::isfinite(links[l].length_m)) {
      problems.push_back(fmt::format(
          "topology.links[{}].length_m: must be positive, got {}", l,
          links[l].length_m));
    }
    for (std::size_t k = 0; k < l; ++k) {
      if (links[k].from == links[l].from && links[k].to == links[l].to) {
        problems.push_back(
            fmt::format("topology.links[{}]: duplicate link {}", l,
                        topology.link_name(l)));
      }
    }
  }

  if (mode_count < 1) {
    problems.push_back("modes.count: must be at least 1");
  }
  if (crosstalk.modes() != mode_count) {
    problems.push_back(fmt::format(
        "crosstalk_db_per_100m: dimension {} does not match mode count {}",
        crosstalk.modes(), mode_count));
  } else {
    for (int a = 0; a < mode_count; ++a) {
      for (int v = 0; v < mode_count; ++v) {
        if (a == v) continue;
        const double y = crosstalk.db_per_100m(a, v);
        if (!std::isfinite(y) || !(y < 0.0)) {
          problems.push_back(fmt::format(
              "crosstalk_db_per_100m[{}][{}]: must be finite and < 0 dB, got {}",
              a, v, y));
        }
      }
    }
  }
  if (!mode_labels.empty() &&
      mode_labels.size() != static_cast<std::size_t>(mode_count)) {
    problems.push_back("modes.labels: length does not match mode count");
  }

  try {
    (void)frame.slot_count();
  } catch (const Error& e) {
    problems.push_back(fmt::format("frame: {}", e.what()));
  }
  if (frame.guard_us && !(*frame.guard_us >= 0.0)) {
    problems.push_back("frame.guard_us: must be non-negative");
  }

  if (!(planner.xt_threshold_db < 0.0)) {
    problems.push_back("planner.xt_threshold_db: must be < 0");
  }
  if (!(planner.link_capacity_gbps > 0.0)) {
    problems.push_back("planner.link_capacity_gbps: must be > 0");
  }
  if (!(planner.granularity_gbps > 0.0)) {
    problems.push_back("planner.granularity_gbps: must be > 0");
  }
  if (planner.big_m && *planner.big_m < 1) {
    problems.push_back("planner.big_m: must be >= 1");
  }
  if (planner.accumulation.kind == AccumulationKind::kTanhCoupling &&
      !(planner.accumulation.coupling_per_m > 0.0)) {
    problems.push_back("planner.accumulation_model.h: must be > 0 for tanh");
  }
  if (planner.objective.kind == ObjectiveKind::kWeighted) {
    if (planner.objective.eta1 && !(*planner.objective.eta1 > 0.0)) {
      problems.push_back("planner.objective_mode.eta1: must be > 0");
    }
    if (planner.objective.eta2 && !(*planner.objective.eta2 >= 0.0)) {
      problems.push_back("planner.objective_mode.eta2: must be >= 0");
    }
  }

  for (std::size_t r = 0; r < requests.size(); ++r) {
    const Request& req = requests[r];
    const std::string where = fmt::format("requests[{}] (id '{}')", r, req.id);
    if (req.id.empty()) problems.push_back(where + ": empty id");
    for (std::size_t q = 0; q < r; ++q) {
      if (requests[q].id == req.id) {
        problems.push_back(where + ": duplicate request id");
      }
    }
    if (req.source >= nodes.size() || req.destination >= nodes.size()) {
      problems.push_back(where + ": endpoint not in topology");
    } else if (req.source == req.destination) {
      problems.push_back(where + ": source equals destination");
    }
    if (!(req.bandwidth_gbps > 0.0) || !std::isfinite(req.bandwidth_gbps)) {
      problems.push_back(where + ": bandwidth_gbps must be positive");
    } else if (planner.granularity_gbps > 0.0 &&
               !is_multiple_of(req.bandwidth_gbps, planner.granularity_gbps)) {
      problems.push_back(fmt::format(
          "{}: bandwidth_gbps {} is not a multiple of the {} Gb/s granularity",
          where, req.bandwidth_gbps, planner.granularity_gbps));
    }
  }

  if (!problems.empty()) throw ValidationError(std::move(problems));
}

Topology build_fat_tree(int edge_count, int agg_count, int core_count,
                        double link_length_m, int pods) {
  if (edge_count < 1 || agg_count < 1 || core_count < 1 || pods < 1) {
    throw Error(ErrorKind::kInvalidParameter,
                "fat tree switch and pod counts must be >= 1");
  }
  if (!(link_length_m > 0.0)) {
    throw Error(ErrorKind::kInvalidParameter,
                "fat tree link length must be positive");
  }
  if (edge_count % pods != 0 || agg_count % pods != 0) {
    throw Error(ErrorKind::kInvalidParameter,
                "edge and aggregation counts must divide evenly into pods");
  }
  Topology topo;
  std::vector<NodeIndex> edges, aggs, cores;
  for (int i = 0; i < edge_count; ++i) {
    edges.push_back(topo.add_node(fmt::format("E{}", i + 1), Tier::kEdge));
  }
  for (int i = 0; i < agg_count; ++i) {
    aggs.push_back(topo.add_node(fmt::format("A{}", i + 1), Tier::kAggregation));
  }
  for (int i = 0; i < core_count; ++i) {
    cores.push_back(topo.add_node(fmt::format("C{}", i + 1), Tier::kCore));
  }
  const int edges_per_pod = edge_count / pods;
  const int aggs_per_pod = agg_count / pods;
  for (int e = 0; e < edge_count; ++e) {
    const int pod = e / edges_per_pod;
    for (int a = pod * aggs_per_pod; a < (pod + 1) * aggs_per_pod; ++a) {
      topo.add_fiber(edges[e], aggs[a], link_length_m);
    }
  }
  for (NodeIndex a : aggs) {
    for (NodeIndex c : cores) topo.add_fiber(a, c, link_length_m);
  }
  return topo;
}

Instance collapse_to_single_slot(const Instance& instance) {
  Instance out = instance;
  out.frame.slice_ms = out.frame.frame_ms;
  out.planner.big_m.reset();
  return out;
}

}  // namespace mmfplan
