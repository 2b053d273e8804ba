#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "builders.hpp"
#include "mmfplan/harness.hpp"
#include "mmfplan/milp.hpp"
#include "mmfplan/solve.hpp"
#include "mutate.hpp"
#include "oracle.hpp"

using namespace mmfplan;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "mmfplan_test_milp";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("closed-form counts match the built model") {
  std::mt19937_64 rng(5);
  oracle::MicroOptions opts;
  opts.max_nodes = 5;
  opts.max_requests = 4;
  opts.max_modes = 4;
  for (int i = 0; i < 30; ++i) {
    const Instance inst = oracle::random_micro(rng, opts);
    const auto built = milp::build_model(inst);
    CHECK(milp::tally(built.model) == milp::count_formulas(inst));
    CHECK(built.index.total() == built.model.variables().size());
    CHECK_NOTHROW(built.model.check_well_formed());
  }
  Instance fig2 = harness::fig2_instance();
  fig2.requests = harness::gen_uniform_traffic(fig2.topology, 12.0, 1.0, 2);
  const auto built = milp::build_model(fig2);
  CHECK(milp::tally(built.model) == milp::count_formulas(fig2));
}

TEST_CASE("tiny fixture sizes") {
  const Instance tiny = harness::tiny_instance();
  const auto c = milp::count_formulas(tiny);
  CHECK(c.variables.at("lambda") == 8);
  CHECK(c.variables.at("beta") == 8);
  CHECK(c.variables.at("theta") == 4);
  CHECK(c.variables.at("c_mode") == 12);
  CHECK(c.total_variables() == 50);
  CHECK(c.constraints.at("eq2") == 8);
  CHECK(c.constraints.at("eq4") == 0);
  CHECK(c.constraints.at("eq7") == 4);
}

TEST_CASE("variable index is a bijection") {
  const Instance inst = harness::tiny_instance();
  const auto built = milp::build_model(inst);
  const auto& v = built.model.variables();
  CHECK(v[built.index.lambda(1, 0, 1, 0)].name == "l_rB_eE1_E2_m2_t0");
  CHECK(v[built.index.rho(0)].name == "rho_rA");
  CHECK(v[built.index.beta(1, 0, 0, 0, 1, 1)].name == "b_rB_rA_eE1_E2_m1_m2_t1");
  CHECK(v[built.index.theta(0, 1, 0, 1, 0)].name == "th_rA_rB_eE1_E2_m2_m1");
  CHECK(v[built.index.c_mode(0, 0, 1, 2)].name == "cm_rA_eE1_E2_m2_k2");
  CHECK(v[built.index.occ(1, 0, 1)].name == "u_rB_eE1_E2_t1");
  CHECK(v[built.index.c_any(1, 0, 0)].name == "ca_rB_eE1_E2_k0");
  CHECK(v[built.index.use_mode(0, 0, 0)].name == "w_rA_eE1_E2_m1");
  CHECK(v[built.index.use_link(1, 0)].name == "y_rB_eE1_E2");
}

TEST_CASE("solver schedules satisfy every row; phase 2 floor binds") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 40; ++i) {
    const Instance inst = oracle::random_micro(rng);
    const Schedule s = solve::solve_exact(inst, {});
    milp::BuildOptions opts;
    opts.throughput_floor = s.throughput_gbps;
    const auto built = milp::build_model(inst, opts);
    const auto x = milp::assignment_from_schedule(built, inst, s);
    CHECK(built.model.violated(x, true).empty());
    Schedule empty = builders::schedule_of(inst, {});
    const auto z = milp::assignment_from_schedule(built, inst, empty);
    CHECK(built.model.violated(z, false).empty());
    if (s.throughput_gbps > 0) {
      const auto bad = built.model.violated(z, true);
      REQUIRE(bad.size() == 1);
      CHECK(bad[0] == "phase2_throughput");
    }
  }
}

TEST_CASE("overlapping co-propagation violates eq11 rows") {
  const Instance inst = builders::shared_link({1, 2});
  const Schedule overlap = builders::schedule_of(
      inst, {builders::place(0, {0}, {0}, 0, 2), builders::place(1, {0}, {1}, 0, 2)});
  const auto built = milp::build_model(inst);
  const auto bad = built.model.violated(milp::assignment_from_schedule(built, inst, overlap));
  CHECK(bad == std::vector<std::string>{"eq11_rA", "eq11_rB"});
}

TEST_CASE("empty model is still a grammatical LP") {
  Instance inst = builders::shared_link({1, 2});
  inst.requests.clear();
  const auto built = milp::build_model(inst);
  CHECK(built.model.variables().empty());
  CHECK(built.model.constraints().empty());
  const std::string lp = milp::emit_lp(built.model, 1);
  CHECK(lp.find("Maximize\n obj:\nSubject To\nBounds\nBinary\nEnd\n") != std::string::npos);
}

TEST_CASE("two-phase files") {
  const Instance tiny = harness::tiny_instance();
  milp::BuildOptions opts;
  opts.throughput_floor = 15.0;
  const auto built = milp::build_model(tiny, opts);
  const auto paths = milp::emit_lp_files(built.model, scratch("tiny.lp"));
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].filename() == "tiny.phase1.lp");
  CHECK(paths[1].filename() == "tiny.phase2.lp");
  const std::string p1 = slurp(paths[0]);
  const std::string p2 = slurp(paths[1]);
  CHECK(p1.find("Maximize") != std::string::npos);
  CHECK(p1.find("phase2_throughput") == std::string::npos);
  CHECK(p2.find("Minimize") != std::string::npos);
  CHECK(p2.find("phase2_throughput: 5 rho_rA + 10 rho_rB >= 15") != std::string::npos);

  Instance weighted = tiny;
  weighted.planner.objective.kind = ObjectiveKind::kWeighted;
  const auto wb = milp::build_model(weighted);
  CHECK_FALSE(wb.model.two_phase());
  const auto wp = milp::emit_lp_files(wb.model, scratch("w.lp"));
  REQUIRE(wp.size() == 1);
  CHECK(wp[0].filename() == "w.lp");
}

TEST_CASE("golden tiny LP") {
  const Instance tiny = harness::tiny_instance();
  milp::BuildOptions opts;
  opts.throughput_floor = solve::solve_exact(tiny, {}).throughput_gbps;
  CHECK(*opts.throughput_floor == 15.0);
  const auto built = milp::build_model(tiny, opts);
  const std::filesystem::path dir = MMFPLAN_GOLDEN_DIR;
  CHECK(milp::emit_lp(built.model, 1) == slurp(dir / "tiny.phase1.lp"));
  CHECK(milp::emit_lp(built.model, 2) == slurp(dir / "tiny.phase2.lp"));
  CHECK(milp::emit_lp(built.model, 1) == milp::emit_lp(milp::build_model(tiny, opts).model, 1));
}

TEST_CASE("size limit") {
  Instance inst = harness::fig2_instance();
  inst.requests = harness::gen_uniform_traffic(inst.topology, 200.0, 1.0, 1);
  milp::BuildOptions opts;
  opts.max_variables = 1000;
  try {
    (void)milp::build_model(inst, opts);
    FAIL("expected kSizeLimit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSizeLimit);
    CHECK(std::string(e.what()).find(std::to_string(milp::count_formulas(inst).total_variables())) !=
          std::string::npos);
  }
}

TEST_CASE("weighted objective carries both terms") {
  Instance tiny = harness::tiny_instance();
  tiny.planner.objective.kind = ObjectiveKind::kWeighted;
  const auto built = milp::build_model(tiny);
  const auto w = solve::objective_weights(tiny);
  // 2 requests x 1 link x 2 modes x 2 slots x 10 Gb/s + 1
  CHECK(w.eta2 == doctest::Approx(1.0 / 81.0));
  CHECK(built.model.objective.terms.size() == 2 + 8);
  CHECK(built.model.objective.terms[1].coef == doctest::Approx(10.0));
  CHECK(built.model.objective.terms[2].coef == doctest::Approx(-1.0 / 81.0));
}
