#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "builders.hpp"
#include "mmfplan/harness.hpp"
#include "mmfplan/instance_io.hpp"

using namespace mmfplan;

namespace {

std::string problems_of(const Json& doc) {
  try {
    (void)load_instance(doc);
  } catch (const ValidationError& e) {
    std::string all;
    for (const auto& p : e.problems()) all += p + "\n";
    return all;
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("round trip") {
  for (const char* name : {"fig2", "fig4", "tiny"}) {
    const Instance inst = harness::fixture(name);
    const Json doc = to_json(inst);
    const Instance back = load_instance(doc);
    CHECK(back == inst);
    CHECK(to_json(back).dump() == doc.dump());
  }
}

TEST_CASE("parse errors carry the offset") {
  try {
    (void)parse_json("{\"a\": [1, 2,, 3]}", "x.json");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    const std::string msg = e.what();
    CHECK(msg.find("x.json") != std::string::npos);
    CHECK(msg.find("13") != std::string::npos);
  }
}

TEST_CASE("missing crosstalk matrix") {
  Json doc = to_json(builders::shared_link({1, 2}));
  doc.erase("crosstalk_db_per_100m");
  CHECK(problems_of(doc).find("crosstalk_db_per_100m: crosstalk matrix required") !=
        std::string::npos);
}

TEST_CASE("diagonal must be null") {
  Json doc = to_json(builders::shared_link({1, 2}));
  doc["crosstalk_db_per_100m"][0][0] = -10.0;
  CHECK_FALSE(problems_of(doc).empty());
}

TEST_CASE("unknown node in a request") {
  Json doc = to_json(builders::shared_link({1, 2}));
  doc["requests"][1]["dst"] = "Q";
  const std::string p = problems_of(doc);
  CHECK(p.find("requests[1]") != std::string::npos);
}

TEST_CASE("modes as object with labels, planner defaults") {
  Json doc = to_json(builders::shared_link({1, 2}));
  doc["modes"] = {{"count", 2}, {"labels", {"LP11", "LP02"}}};
  doc.erase("planner");
  const Instance inst = load_instance(doc);
  CHECK(inst.mode_count == 2);
  CHECK(inst.mode_label(0) == "LP11");
  CHECK(inst.planner.xt_threshold_db == -13.0);
  CHECK(inst.planner.link_capacity_gbps == 10.0);
  CHECK(inst.planner.accumulation.kind == AccumulationKind::kLinearPower);
  CHECK(inst.planner.objective.kind == ObjectiveKind::kLexicographic);
}

TEST_CASE("accumulation and objective forms") {
  Json doc = to_json(builders::shared_link({1, 2}));
  doc["planner"]["accumulation_model"] = {{"kind", "tanh"}, {"h", 0.001}};
  doc["planner"]["objective_mode"] = {{"kind", "weighted"}, {"eta1", 2.0}};
  const Instance inst = load_instance(doc);
  CHECK(inst.planner.accumulation.kind == AccumulationKind::kTanhCoupling);
  CHECK(inst.planner.accumulation.coupling_per_m == 0.001);
  CHECK(inst.planner.objective.kind == ObjectiveKind::kWeighted);
  CHECK(inst.planner.objective.eta1 == 2.0);
  CHECK_FALSE(inst.planner.objective.eta2.has_value());

  doc["planner"]["accumulation_model"] = "paper-literal-db";
  CHECK(load_instance(doc).planner.accumulation.kind == AccumulationKind::kLiteralDb);
  doc["planner"]["accumulation_model"] = "bogus";
  CHECK_FALSE(problems_of(doc).empty());
}

TEST_CASE("requests and topology documents") {
  const Instance inst = harness::fig2_instance();
  const Topology t = load_topology(to_json(inst.topology));
  CHECK(t == inst.topology);
  std::vector<Request> reqs{Request{"r1", 0, 1, 3.0}};
  const auto back = load_requests(requests_to_json(reqs, t), t);
  CHECK(back == reqs);
}
