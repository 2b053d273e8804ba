// mmfplan: plan, validate, sweep, emit-lp, gen-traffic, timeline, fixtures.
//
// Exit codes: 0 ok, 1 validation failure or invalid input, 2 usage error,
// 3 internal error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "mmfplan/harness.hpp"
#include "mmfplan/instance_io.hpp"
#include "mmfplan/milp.hpp"
#include "mmfplan/model.hpp"
#include "mmfplan/schedule.hpp"
#include "mmfplan/solve.hpp"
#include "mmfplan/timeline.hpp"
#include "mmfplan/validate.hpp"

namespace {

using namespace mmfplan;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct LimitFlags {
  std::int64_t node_budget = 1'000'000;
  double wall_clock_s = 600.0;
  int k_paths = 4;
  bool all_subsets = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--node-budget", node_budget, "Branch-and-bound node budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--time-limit", wall_clock_s, "Wall-clock budget in seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--k-paths", k_paths, "Candidate paths per request")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--all-mode-subsets", all_subsets,
                  "Consider every mode subset, not only contiguous runs");
  }

  solve::SolveLimits limits() const {
    solve::SolveLimits l;
    l.node_budget = node_budget;
    l.wall_clock_s = wall_clock_s;
    l.k_paths = k_paths;
    l.mode_subsets = all_subsets ? solve::ModeSubsets::kAll
                                 : solve::ModeSubsets::kContiguous;
    return l;
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

Instance load_for_schedule(const std::string& path, bool single_slot) {
  Instance inst = load_instance_file(path);
  return single_slot ? collapse_to_single_slot(inst) : inst;
}

int cmd_plan(const std::string& in, const std::string& solver,
             const std::string& out, const LimitFlags& flags) {
  const Instance inst = load_instance_file(in);
  const auto kind = harness::solver_from_string(solver);
  const Schedule s = harness::run_solver(inst, kind, flags.limits());
  const Instance& ref =
      kind == harness::SolverKind::kBaseline ? collapse_to_single_slot(inst) : inst;
  const std::string doc = to_json(s, ref).dump(2) + "\n";
  const std::string summary = fmt::format(
      "solver={} throughput_gbps={} lambda_count={} accepted={}/{} optimal={}\n",
      solver, s.throughput_gbps, s.lambda_count, s.accepted.size(),
      inst.requests.size(), s.optimal ? "true" : "false");
  if (out.empty() || out == "-") {
    std::cout << doc;
    std::cerr << summary;
  } else {
    write_text_file(out, doc);
    std::cout << summary;
  }
  return kExitOk;
}

int cmd_validate(const std::string& in, const std::string& sched, bool single_slot) {
  const Instance inst = load_for_schedule(in, single_slot);
  const auto report = validate::check_document(inst, read_json_file(sched));
  std::cout << validate::to_json(report).dump(2) << "\n";
  return report.pass() ? kExitOk : kExitInvalid;
}

int cmd_sweep(const std::string& in, const std::string& fixture_name,
              const std::vector<double>& loads, const std::vector<std::string>& solvers,
              int trials, std::uint64_t seed, const std::string& out,
              const std::string& meta_out, const LimitFlags& flags) {
  if (in.empty() == fixture_name.empty()) {
    throw Error(ErrorKind::kInvalidParameter, "give exactly one of -i or --fixture");
  }
  const Instance tmpl = in.empty() ? harness::fixture(fixture_name) : load_instance_file(in);
  harness::SweepConfig cfg;
  cfg.loads_gbps = loads;
  for (const auto& s : solvers) cfg.solvers.push_back(harness::solver_from_string(s));
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.limits = flags.limits();
  const auto result = harness::run_sweep(tmpl, cfg);
  emit(out, result.to_csv());
  std::string meta = meta_out;
  if (meta.empty() && !out.empty() && out != "-") {
    std::filesystem::path p(out);
    p.replace_extension(".json");
    meta = p.string();
  }
  if (!meta.empty()) write_text_file(meta, result.metadata(cfg).dump(2) + "\n");
  for (const auto& m : result.means()) {
    std::cerr << fmt::format("load={} solver={} mean_throughput_gbps={:.4f} "
                             "mean_acceptance={:.4f}\n",
                             m.load_gbps, harness::to_string(m.solver),
                             m.throughput_gbps, m.acceptance_ratio);
  }
  return kExitOk;
}

int cmd_emit_lp(const std::string& in, const std::string& out,
                const std::string& objective, std::optional<double> floor,
                const LimitFlags& flags) {
  Instance inst = load_instance_file(in);
  if (objective == "weighted") {
    inst.planner.objective.kind = ObjectiveKind::kWeighted;
  } else if (objective == "lexicographic") {
    inst.planner.objective.kind = ObjectiveKind::kLexicographic;
  }
  milp::BuildOptions opts;
  if (inst.planner.objective.kind == ObjectiveKind::kLexicographic) {
    if (!floor) {
      auto limits = flags.limits();
      limits.mode_subsets = solve::ModeSubsets::kAll;
      const Schedule s = solve::solve_exact(inst, limits);
      if (!s.optimal) {
        std::cerr << "warning: phase 1 optimum not proven; floor is a lower bound\n";
      }
      floor = s.throughput_gbps;
    }
    opts.throughput_floor = floor;
  }
  const auto built = milp::build_model(inst, opts);
  for (const auto& p : milp::emit_lp_files(built.model, out)) {
    std::cout << p.string() << "\n";
  }
  return kExitOk;
}

int cmd_gen_traffic(const std::string& in, double load, std::uint64_t seed,
                    double granularity, double capacity, const std::string& out) {
  const Json doc = read_json_file(in);
  const Topology topo = load_topology(doc.contains("topology") ? doc.at("topology") : doc);
  const auto reqs = harness::gen_uniform_traffic(topo, load, granularity, seed, capacity);
  emit(out, requests_to_json(reqs, topo).dump(2) + "\n");
  return kExitOk;
}

int cmd_timeline(const std::string& in, const std::string& sched,
                 const std::string& link, bool single_slot) {
  const Instance inst = load_for_schedule(in, single_slot);
  const Schedule s = schedule_from_json(read_json_file(sched), inst);
  std::optional<LinkIndex> which;
  if (!link.empty()) {
    const auto colon = link.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::kInvalidParameter, "--link expects FROM:TO");
    }
    const auto from = inst.topology.find_node(link.substr(0, colon));
    const auto to = inst.topology.find_node(link.substr(colon + 1));
    std::optional<LinkIndex> l;
    if (from && to) l = inst.topology.find_link(*from, *to);
    if (!l) throw Error(ErrorKind::kInvalidParameter, "no link " + link);
    which = l;
  }
  std::cout << render_timeline(inst, s, which);
  return kExitOk;
}

int cmd_fixtures(const std::string& name, const std::string& out,
                 const std::string& schedule_out) {
  const Instance inst = harness::fixture(name);
  emit(out, to_json(inst).dump(2) + "\n");
  if (!schedule_out.empty()) {
    if (name != "fig4") {
      throw Error(ErrorKind::kInvalidParameter, "--schedule is only bundled for fig4");
    }
    write_text_file(schedule_out,
                    to_json(harness::fig4_schedule(inst), inst).dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode and time-slice planner for multi-mode fiber datacenter networks"};
  app.require_subcommand(1);

  std::string in, out, sched, solver = "exact", objective, fixture_name, link;
  std::string meta_out, schedule_out, name;
  std::vector<double> loads;
  std::vector<std::string> solvers{"exact", "baseline"};
  int trials = 20;
  std::uint64_t seed = 1;
  double load = 0.0, granularity = 1.0, capacity = 10.0;
  std::optional<double> floor;
  bool single_slot = false;
  LimitFlags flags;

  auto* plan = app.add_subcommand("plan", "Solve an instance and write the schedule");
  plan->add_option("-i,--instance", in, "Instance JSON")->required()->check(CLI::ExistingFile);
  plan->add_option("--solver", solver, "exact | greedy | baseline")
      ->check(CLI::IsMember({"exact", "greedy", "baseline"}));
  plan->add_option("-o,--output", out, "Schedule JSON (stdout if omitted)");
  flags.attach(plan);

  auto* val = app.add_subcommand("validate", "Check a schedule against an instance");
  val->add_option("-i,--instance", in, "Instance JSON")->required()->check(CLI::ExistingFile);
  val->add_option("-s,--schedule", sched, "Schedule JSON")->required()->check(CLI::ExistingFile);
  val->add_flag("--single-slot", single_slot,
                "Check against the one-slot collapse (baseline schedules)");

  auto* sweep = app.add_subcommand("sweep", "Offered-load sweep over generated traffic");
  sweep->add_option("-i,--instance", in, "Template instance JSON (requests ignored)")
      ->check(CLI::ExistingFile);
  sweep->add_option("--fixture", fixture_name, "Bundled template instead of -i");
  sweep->add_option("--loads", loads, "Offered loads in Gb/s")->required()->delimiter(',');
  sweep->add_option("--solvers", solvers, "exact, greedy, baseline")->delimiter(',');
  sweep->add_option("--trials", trials, "Trials per load")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "Master seed");
  sweep->add_option("-o,--output", out, "Results CSV (stdout if omitted)");
  sweep->add_option("--meta", meta_out, "Metadata JSON (default: CSV path with .json)");
  flags.attach(sweep);

  auto* lp = app.add_subcommand("emit-lp", "Write the planning model in LP format");
  lp->add_option("-i,--instance", in, "Instance JSON")->required()->check(CLI::ExistingFile);
  lp->add_option("-o,--output", out, "LP path; two-phase models get .phase1/.phase2")
      ->required();
  lp->add_option("--objective", objective, "lexicographic | weighted (default: instance)")
      ->check(CLI::IsMember({"lexicographic", "weighted"}));
  lp->add_option("--floor", floor, "Phase 2 throughput floor (default: solve phase 1)");
  flags.attach(lp);

  auto* gen = app.add_subcommand("gen-traffic", "Generate uniform edge-to-edge requests");
  gen->add_option("-i,--topology", in, "Topology or instance JSON")
      ->required()
      ->check(CLI::ExistingFile);
  gen->add_option("--load", load, "Offered load in Gb/s")->required();
  gen->add_option("--seed", seed, "Seed");
  gen->add_option("--granularity", granularity, "Bandwidth step in Gb/s");
  gen->add_option("--capacity", capacity, "Largest request in Gb/s");
  gen->add_option("-o,--output", out, "Requests JSON (stdout if omitted)");

  auto* tl = app.add_subcommand("timeline", "Render link occupancy as an ASCII grid");
  tl->add_option("-i,--instance", in, "Instance JSON")->required()->check(CLI::ExistingFile);
  tl->add_option("-s,--schedule", sched, "Schedule JSON")->required()->check(CLI::ExistingFile);
  tl->add_option("--link", link, "FROM:TO (default: every used link)");
  tl->add_flag("--single-slot", single_slot, "Schedule refers to the one-slot collapse");

  auto* fx = app.add_subcommand("fixtures", "Write a bundled instance");
  fx->add_option("--name", name, "fig2 | fig4 | tiny")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig4", "tiny"}));
  fx->add_option("-o,--output", out, "Instance JSON (stdout if omitted)");
  fx->add_option("--schedule", schedule_out, "Also write the reference schedule (fig4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (plan->parsed()) return cmd_plan(in, solver, out, flags);
    if (val->parsed()) return cmd_validate(in, sched, single_slot);
    if (sweep->parsed()) {
      return cmd_sweep(in, fixture_name, loads, solvers, trials, seed, out, meta_out,
                       flags);
    }
    if (lp->parsed()) return cmd_emit_lp(in, out, objective, floor, flags);
    if (gen->parsed()) {
      return cmd_gen_traffic(in, load, seed, granularity, capacity, out);
    }
    if (tl->parsed()) return cmd_timeline(in, sched, link, single_slot);
    if (fx->parsed()) return cmd_fixtures(name, out, schedule_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::kParse:
      case ErrorKind::kValidation:
      case ErrorKind::kNotScheduled:
      case ErrorKind::kInvalidTopology:
        return kExitInvalid;
      case ErrorKind::kInvalidParameter:
        return kExitUsage;
      default:
        return kExitInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
