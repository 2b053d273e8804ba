// Domain types for mode/time-slice planning in multi-mode-fiber networks.
//
// Everything here is a plain value type. Instances are built once (from JSON
// or from the generators) and shared read-only afterwards.

#ifndef MMFPLAN_MODEL_HPP_
#define MMFPLAN_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mmfplan {

enum class ErrorKind {
  kInvalidParameter,
  kParse,
  kValidation,
  kNotScheduled,
  kSizeLimit,
  kInvalidPair,
  kInvalidTopology,
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Validation failure carrying every problem found, each prefixed with the
// field path it refers to.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Absolute tolerance used for bandwidth / throughput comparisons.
inline constexpr double kEps = 1e-9;

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;
using RequestIndex = std::size_t;
using ModeIndex = int;

enum class Tier { kEdge, kAggregation, kCore, kOther };

std::string_view to_string(Tier tier);
Tier tier_from_string(std::string_view s);

struct Node {
  std::string id;
  Tier tier = Tier::kOther;

  bool operator==(const Node&) const = default;
};

struct Link {
  NodeIndex from = 0;
  NodeIndex to = 0;
  double length_m = 0.0;

  bool operator==(const Link&) const = default;
};

// Directed graph of switches and MMF links. A duplex fiber is two links.
class Topology {
 public:
  Topology() = default;

  NodeIndex add_node(std::string id, Tier tier);
  LinkIndex add_link(NodeIndex from, NodeIndex to, double length_m);
  // Adds both directions.
  void add_fiber(NodeIndex a, NodeIndex b, double length_m);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }

  std::optional<NodeIndex> find_node(std::string_view id) const;
  std::optional<LinkIndex> find_link(NodeIndex from, NodeIndex to) const;
  const std::vector<LinkIndex>& out_links(NodeIndex n) const {
    return out_[n];
  }
  std::vector<NodeIndex> nodes_in_tier(Tier tier) const;

  std::string link_name(LinkIndex l) const;

  bool operator==(const Topology& o) const {
    return nodes_ == o.nodes_ && links_ == o.links_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkIndex>> out_;
};

struct Request {
  std::string id;
  NodeIndex source = 0;
  NodeIndex destination = 0;
  double bandwidth_gbps = 0.0;

  bool operator==(const Request&) const = default;
};

struct FrameConfig {
  double frame_ms = 20.0;
  double slice_ms = 5.0;
  std::optional<double> guard_us;

  // T / S; throws kInvalidParameter if S does not divide T.
  int slot_count() const;

  bool operator==(const FrameConfig&) const = default;
};

// Y[aggressor][victim] in dB per 100 m. The diagonal is unused (stored as 0).
class CrosstalkMatrix {
 public:
  CrosstalkMatrix() = default;
  explicit CrosstalkMatrix(int modes);
  CrosstalkMatrix(int modes, std::vector<double> row_major);

  // The 4x4 coupling table for the LP01/LP11/LP02/LP31 mode set.
  static CrosstalkMatrix reference_table();

  int modes() const { return modes_; }
  double db_per_100m(ModeIndex aggressor, ModeIndex victim) const;
  void set(ModeIndex aggressor, ModeIndex victim, double db);
  // Strongest (least negative) off-diagonal entry.
  double strongest_db() const;
  // Principal sub-matrix over the given modes, in that order.
  CrosstalkMatrix restricted(const std::vector<ModeIndex>& keep) const;

  bool operator==(const CrosstalkMatrix&) const = default;

 private:
  int modes_ = 0;
  std::vector<double> values_;
};

enum class AccumulationKind { kLinearPower, kLiteralDb, kTanhCoupling };

std::string_view to_string(AccumulationKind kind);

struct AccumulationModel {
  AccumulationKind kind = AccumulationKind::kLinearPower;
  double coupling_per_m = 0.0;  // h, tanh-coupling only

  bool operator==(const AccumulationModel&) const = default;
};

enum class ObjectiveKind { kLexicographic, kWeighted };

struct ObjectiveMode {
  ObjectiveKind kind = ObjectiveKind::kLexicographic;
  // Weighted only. Unset weights take the dominance-guaranteeing defaults.
  std::optional<double> eta1;
  std::optional<double> eta2;

  bool operator==(const ObjectiveMode&) const = default;
};

struct PlannerConfig {
  double xt_threshold_db = -13.0;
  double link_capacity_gbps = 10.0;
  std::optional<int> big_m;  // defaults to the slot count
  AccumulationModel accumulation;
  ObjectiveMode objective;
  double granularity_gbps = 1.0;

  bool operator==(const PlannerConfig&) const = default;
};

struct Instance {
  Topology topology;
  std::vector<Request> requests;
  FrameConfig frame;
  int mode_count = 0;
  std::vector<std::string> mode_labels;  // empty: m1..mN
  CrosstalkMatrix crosstalk;
  PlannerConfig planner;

  int slot_count() const { return frame.slot_count(); }
  int big_m() const { return planner.big_m.value_or(slot_count()); }
  double slot_capacity_gbps() const;
  // Slot units q_r for request r.
  int slot_units(RequestIndex r) const;
  std::string mode_label(ModeIndex m) const;
  std::optional<RequestIndex> find_request(std::string_view id) const;

  // Throws ValidationError listing every violated invariant.
  void validate() const;

  bool operator==(const Instance&) const = default;
};

// C * S / T: the bandwidth one slot on one mode carries.
double slot_capacity_gbps(const FrameConfig& frame, const PlannerConfig& config);

// ceil(bandwidth / slot_capacity), tolerant to floating-point noise.
int required_slot_units(double bandwidth_gbps, double slot_capacity_gbps);

// Three-tier fat tree. Edge and aggregation switches are split evenly into
// `pods`; inside a pod every edge switch links to every aggregation switch,
// and every aggregation switch links to every core switch.
Topology build_fat_tree(int edge_count, int agg_count, int core_count,
                        double link_length_m, int pods = 1);

// Same instance with the frame collapsed to a single slot (T = S).
Instance collapse_to_single_slot(const Instance& instance);

}  // namespace mmfplan

#endif  // MMFPLAN_MODEL_HPP_
