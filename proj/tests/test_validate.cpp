#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "builders.hpp"
#include "mmfplan/harness.hpp"
#include "mmfplan/solve.hpp"
#include "mmfplan/validate.hpp"
#include "mutate.hpp"
#include "oracle.hpp"

using namespace mmfplan;
using builders::place;

TEST_CASE("empty schedule passes") {
  const Instance inst = builders::shared_link({1, 2});
  const Schedule s = builders::schedule_of(inst, {});
  CHECK(validate::check_schedule(inst, s).pass());
  CHECK(validate::throughput_gbps(inst, s) == 0.0);
  CHECK(validate::resource_usage(s) == 0);
}

TEST_CASE("double booking is a single eq7 violation") {
  const Instance inst = builders::shared_link({0, 1});
  const Schedule s = builders::schedule_of(
      inst, {place(0, {0}, {0}, 1, 3), place(1, {0}, {0}, 2, 4)});
  const auto rep = validate::check_schedule(inst, s);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].family == "eq7");
  CHECK(rep.violations[0].location.find("slot 2") != std::string::npos);
}

TEST_CASE("sliced passes, overlapping fails eq11 at -12.79 dB") {
  const Instance inst = builders::shared_link({1, 2});
  const Schedule sliced = builders::schedule_of(
      inst, {place(0, {0}, {0}, 0, 2), place(1, {0}, {1}, 2, 4)});
  CHECK(validate::check_schedule(inst, sliced).pass());
  CHECK(validate::throughput_gbps(inst, sliced) == 10.0);

  const Schedule overlap = builders::schedule_of(
      inst, {place(0, {0}, {0}, 0, 2), place(1, {0}, {1}, 0, 2)});
  const auto rep = validate::check_schedule(inst, overlap);
  CHECK(rep.count("eq11") == 2);
  CHECK(rep.violations.size() == 2);
  bool seen = false;
  for (const auto& v : rep.violations) {
    seen = seen || v.message.find("-12.79") != std::string::npos;
  }
  CHECK(seen);
}

TEST_CASE("resource usage counts cells") {
  const Instance inst = builders::chain(1);
  Schedule s = builders::schedule_of(inst, {place(0, {0, 1}, {0}, 0, 2)});
  CHECK(validate::resource_usage(s) == 4);
  s.accepted[0].modes = {0, 1};
  CHECK(validate::resource_usage(s) == 8);
}

TEST_CASE("throughput examples") {
  Instance inst = harness::fig2_instance();
  inst.requests = {Request{"r", *inst.topology.find_node("E1"), *inst.topology.find_node("E2"), 3.0}};
  const Schedule s = solve::solve_exact(inst, {});
  CHECK(validate::throughput_gbps(inst, s) == 3.0);
}

TEST_CASE("each family is detected") {
  const Instance inst = builders::chain(1);  // A: 2 Gb/s, q = 1
  SUBCASE("broken path") {
    const auto rep = validate::check_schedule(
        inst, builders::schedule_of(inst, {place(0, {1, 0}, {0}, 0, 1)}));
    CHECK(rep.count("eq2") > 0);
  }
  SUBCASE("not reaching the destination") {
    const auto rep = validate::check_schedule(
        inst, builders::schedule_of(inst, {place(0, {0}, {0}, 0, 1)}));
    CHECK(rep.count("eq2") > 0);
  }
  SUBCASE("too little supply") {
    Instance big = inst;
    big.requests[0].bandwidth_gbps = 10.0;  // q = 4
    const auto rep = validate::check_schedule(
        big, builders::schedule_of(big, {place(0, {0, 1}, {0, 1}, 0, 1)}));
    CHECK(rep.count("eq10") == 2);
    CHECK(rep.count("eq2") > 0);
  }
  SUBCASE("out of frame is structural only") {
    const auto rep = validate::check_schedule(
        inst, builders::schedule_of(inst, {place(0, {0, 1}, {0}, 3, 5)}));
    CHECK(rep.count("structural") == rep.violations.size());
    CHECK_FALSE(rep.pass());
  }
}

TEST_CASE("document with dangling references") {
  const Instance inst = builders::shared_link({1, 2});
  Json doc = to_json(builders::schedule_of(inst, {place(0, {0}, {0}, 0, 2)}), inst);
  doc["accepted"][0]["request_id"] = "nope";
  const auto rep = validate::check_document(inst, doc);
  REQUIRE_FALSE(rep.pass());
  CHECK(rep.count("structural") == rep.violations.size());
}

TEST_CASE("solver outputs pass and their mutants are judged like the model") {
  std::mt19937_64 rng(11);
  int must = 0;
  for (int i = 0; i < 40; ++i) {
    const Instance inst = oracle::random_micro(rng);
    const auto built = milp::build_model(inst);
    for (const Schedule& s : {solve::solve_exact(inst, {}), solve::solve_greedy(inst, {})}) {
      REQUIRE(validate::check_schedule(inst, s).pass());
      REQUIRE(mutate::model_accepts(built, inst, s));
      for (const auto& m : mutate::all_mutants(inst, s)) {
        CAPTURE(m.what);
        const bool ok = validate::check_schedule(inst, m.schedule).pass();
        CHECK(ok == mutate::model_accepts(built, inst, m.schedule));
        if (m.must_fail) {
          ++must;
          CHECK_FALSE(ok);
        }
      }
    }
  }
  CHECK(must > 0);
}
