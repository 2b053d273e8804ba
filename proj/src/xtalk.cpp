#include "mmfplan/xtalk.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace mmfplan::xtalk {

namespace {

constexpr double kDbSlack = 1e-9;

double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

double coupled_power_ratio(double h_per_m, double z_m) {
  return std::tanh(h_per_m * z_m);
}

double pairwise_contribution(const CrosstalkMatrix& matrix, ModeIndex aggressor,
                             ModeIndex victim, double length_m,
                             const AccumulationModel& model) {
  if (aggressor == victim) {
    throw Error(ErrorKind::kInvalidPair,
                fmt::format("no self-crosstalk for mode {}", aggressor));
  }
  const double y = matrix.db_per_100m(aggressor, victim);
  switch (model.kind) {
    case AccumulationKind::kLinearPower:
      return length_m / 100.0 * db_to_ratio(y);
    case AccumulationKind::kLiteralDb:
      return length_m / 100.0 * y;
    case AccumulationKind::kTanhCoupling:
      return coupled_power_ratio(model.coupling_per_m, length_m) *
             db_to_ratio(y - matrix.strongest_db());
  }
  return 0.0;
}

double total_to_db(double accumulated, std::size_t terms,
                   const AccumulationModel& model) {
  if (terms == 0) return -std::numeric_limits<double>::infinity();
  if (model.kind == AccumulationKind::kLiteralDb) return accumulated;
  if (accumulated <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(accumulated);
}

double threshold_in_domain(double threshold_db, const AccumulationModel& model) {
  if (model.kind == AccumulationKind::kLiteralDb) return threshold_db;
  return db_to_ratio(threshold_db);
}

bool within_threshold(double accumulated, std::size_t terms,
                      double threshold_db, const AccumulationModel& model) {
  if (terms == 0) return true;
  if (model.kind == AccumulationKind::kLiteralDb) {
    return accumulated <= threshold_db + kDbSlack;
  }
  return accumulated <= db_to_ratio(threshold_db + kDbSlack);
}

CrosstalkReport accumulate_for_request(RequestIndex victim,
                                       const Schedule& schedule,
                                       const Instance& instance) {
  const Assignment* self = schedule.find(victim);
  if (!self) {
    throw Error(ErrorKind::kNotScheduled,
                fmt::format("request '{}' is not scheduled",
                            victim < instance.requests.size()
                                ? instance.requests[victim].id
                                : std::to_string(victim)));
  }
  const auto& model = instance.planner.accumulation;
  CrosstalkReport report;
  report.request = victim;
  for (LinkIndex link : self->path) {
    const double length = instance.topology.links()[link].length_m;
    for (const Assignment& other : schedule.accepted) {
      if (other.request == victim || !self->overlaps_in_time(other)) continue;
      bool shares_link = false;
      for (LinkIndex l : other.path) shares_link = shares_link || l == link;
      if (!shares_link) continue;
      for (ModeIndex vm : self->modes) {
        for (ModeIndex am : other.modes) {
          if (am == vm) continue;
          Term t;
          t.link = link;
          t.aggressor_request = other.request;
          t.aggressor_mode = am;
          t.victim_mode = vm;
          t.contribution =
              pairwise_contribution(instance.crosstalk, am, vm, length, model);
          t.contribution_db = total_to_db(t.contribution, 1, model);
          report.accumulated += t.contribution;
          report.terms.push_back(t);
        }
      }
    }
  }
  report.total_db = total_to_db(report.accumulated, report.terms.size(), model);
  report.feasible =
      within_threshold(report.accumulated, report.terms.size(),
                       instance.planner.xt_threshold_db, model);
  return report;
}

Json db_to_json(double db) {
  if (std::isinf(db) && db < 0) return "-inf";
  return db;
}

Json to_json(const CrosstalkReport& report, const Instance& instance) {
  Json terms = Json::array();
  for (const Term& t : report.terms) {
    terms.push_back(
        {{"link", instance.topology.link_name(t.link)},
         {"aggressor_request", instance.requests[t.aggressor_request].id},
         {"aggressor_mode", t.aggressor_mode},
         {"victim_mode", t.victim_mode},
         {"contribution_db", db_to_json(t.contribution_db)}});
  }
  return {{"request_id", instance.requests[report.request].id},
          {"total_db", db_to_json(report.total_db)},
          {"feasible", report.feasible},
          {"terms", terms}};
}

}  // namespace mmfplan::xtalk
