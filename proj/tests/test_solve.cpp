#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "builders.hpp"
#include "mmfplan/harness.hpp"
#include "mmfplan/solve.hpp"
#include "mmfplan/validate.hpp"
#include "oracle.hpp"

using namespace mmfplan;

namespace {

solve::SolveLimits wide() {
  solve::SolveLimits l;
  l.k_paths = 16;
  l.mode_subsets = solve::ModeSubsets::kAll;
  return l;
}

void expect_valid(const Instance& inst, const Schedule& s) {
  const auto rep = validate::check_schedule(inst, s);
  for (const auto& v : rep.violations) INFO(v.family << " " << v.location << " " << v.message);
  CHECK(rep.pass());
}

}  // namespace

TEST_CASE("candidate enumeration examples") {
  Instance inst = builders::shared_link({1, 2});
  inst.requests[0].bandwidth_gbps = 2.0;  // q = 1
  const auto c = solve::enumerate_candidates(inst, 0, 4, solve::ModeSubsets::kContiguous);
  CHECK(c.size() == 8);
  for (const auto& x : c) {
    CHECK(x.supply() == 1);
    CHECK(x.path.length_m == 200.0);
  }
  CHECK(c[0].slot_start == 0);
  CHECK(c[0].modes == std::vector<ModeIndex>{0});

  Instance one = builders::shared_link({1});
  one.requests[0].bandwidth_gbps = 10.0;  // q = 4
  const auto f = solve::enumerate_candidates(one, 0, 4, solve::ModeSubsets::kContiguous);
  REQUIRE(f.size() == 1);
  CHECK(f[0].slot_start == 0);
  CHECK(f[0].slot_end == 4);

  Instance back = builders::shared_link({1, 2});
  std::swap(back.requests[0].source, back.requests[0].destination);
  CHECK(solve::enumerate_candidates(back, 0, 4, solve::ModeSubsets::kAll).empty());
}

TEST_CASE("candidates are never grossly oversized") {
  const Instance inst = harness::fig2_instance();
  Instance i = inst;
  i.requests = {Request{"r", *i.topology.find_node("E1"), *i.topology.find_node("E4"), 7.0}};
  for (auto subsets : {solve::ModeSubsets::kContiguous, solve::ModeSubsets::kAll}) {
    const auto c = solve::enumerate_candidates(i, 0, 4, subsets);
    CHECK_FALSE(c.empty());
    for (std::size_t k = 0; k < c.size(); ++k) {
      const int w = static_cast<int>(c[k].modes.size());
      const int len = c[k].slot_end - c[k].slot_start;
      CHECK(c[k].supply() >= 3);
      CHECK(c[k].supply() - 3 < std::min(w, len));
      if (k > 0) CHECK(c[k - 1].supply() <= c[k].supply());
    }
  }
}

TEST_CASE("two requests on one 200 m link with m2/m3") {
  const Instance inst = builders::shared_link({1, 2});
  const solve::SolveLimits limits;

  const Schedule exact = solve::solve_exact(inst, limits);
  CHECK(exact.throughput_gbps == 10.0);
  CHECK(exact.optimal);
  CHECK(exact.accepted.size() == 2);
  CHECK_FALSE(exact.accepted[0].overlaps_in_time(exact.accepted[1]));
  expect_valid(inst, exact);

  const Schedule greedy = solve::solve_greedy(inst, limits);
  CHECK(greedy.accepted.size() == 2);
  expect_valid(inst, greedy);

  const Schedule base = solve::solve_baseline_conventional(inst, limits);
  CHECK(base.throughput_gbps == 5.0);
  CHECK(base.accepted.size() == 1);
  expect_valid(collapse_to_single_slot(inst), base);

  const Schedule lifted = solve::lift_single_slot_schedule(base, inst);
  expect_valid(inst, lifted);
  CHECK(lifted.throughput_gbps == 5.0);
}

TEST_CASE("single request is always accepted") {
  Instance inst = harness::fig2_instance();
  inst.requests = {Request{"r", *inst.topology.find_node("E1"), *inst.topology.find_node("E3"), 10.0}};
  const Schedule e = solve::solve_exact(inst, {});
  const Schedule g = solve::solve_greedy(inst, {});
  CHECK(e.throughput_gbps == 10.0);
  CHECK(e == [&] { Schedule x = g; x.optimal = e.optimal; return x; }());
  CHECK(solve::solve_baseline_conventional(inst, {}).throughput_gbps == 10.0);
}

TEST_CASE("exact matches the brute-force oracle") {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 60; ++i) {
    const Instance inst = oracle::random_micro(rng);
    const Schedule s = solve::solve_exact(inst, wide());
    const auto o = oracle::brute_force(inst);
    CAPTURE(i);
    CHECK(s.optimal);
    CHECK(s.throughput_gbps == doctest::Approx(o.throughput_gbps));
    CHECK(s.lambda_count == o.lambda_count);
    expect_valid(inst, s);
  }
}

TEST_CASE("determinism, monotonicity and containment") {
  std::mt19937_64 rng(99);
  oracle::MicroOptions opts;
  opts.max_requests = 4;
  opts.max_modes = 4;
  for (int i = 0; i < 40; ++i) {
    Instance inst = oracle::random_micro(rng, opts);
    const Schedule a = solve::solve_exact(inst, {});
    const Schedule b = solve::solve_exact(inst, {});
    CHECK(to_json(a, inst).dump() == to_json(b, inst).dump());

    const Schedule base = solve::solve_baseline_conventional(inst, {});
    CHECK(base.throughput_gbps <= a.throughput_gbps + kEps);
    const Schedule greedy = solve::solve_greedy(inst, {});
    CHECK(greedy.throughput_gbps <= a.throughput_gbps + kEps);

    Instance relaxed = inst;
    relaxed.planner.xt_threshold_db = inst.planner.xt_threshold_db + 3.0;
    if (relaxed.planner.xt_threshold_db < 0.0) {
      CHECK(solve::solve_exact(relaxed, {}).throughput_gbps >= a.throughput_gbps - kEps);
    }
  }
}

TEST_CASE("budget exhaustion keeps the best found") {
  Instance inst = harness::fig2_instance();
  inst.requests = harness::gen_uniform_traffic(inst.topology, 120.0, 1.0, 5);
  solve::SolveLimits tight;
  tight.node_budget = 50;
  const Schedule s = solve::solve_exact(inst, tight);
  CHECK_FALSE(s.optimal);
  expect_valid(inst, s);

  const Schedule g = solve::solve_greedy(inst, {});
  const Schedule seeded = solve::solve_exact(inst, tight, &g);
  CHECK(seeded.throughput_gbps >= g.throughput_gbps - kEps);
  expect_valid(inst, seeded);
}

TEST_CASE("weighted objective agrees on throughput") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    Instance inst = oracle::random_micro(rng);
    const Schedule lex = solve::solve_exact(inst, {});
    inst.planner.objective.kind = ObjectiveKind::kWeighted;
    const auto w = solve::objective_weights(inst);
    CHECK(w.eta1 == 1.0);
    CHECK(w.eta2 > 0.0);
    const Schedule weighted = solve::solve_exact(inst, {});
    CHECK(weighted.throughput_gbps == doctest::Approx(lex.throughput_gbps));
    CHECK(weighted.lambda_count == lex.lambda_count);
  }
}

TEST_CASE("literal dB model is checked at the leaves") {
  Instance inst = builders::shared_link({1, 2});
  inst.planner.accumulation.kind = AccumulationKind::kLiteralDb;
  const Schedule s = solve::solve_exact(inst, {});
  expect_valid(inst, s);
}
