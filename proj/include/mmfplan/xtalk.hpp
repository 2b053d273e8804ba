// Modal crosstalk models and per-request accumulation.
//
// Three accumulation models are supported:
//   linear-power      each overlap contributes (d/100) * 10^(Y/10) as a power
//                     ratio; the total is converted to dB once.
//   paper-literal-db  each overlap contributes (d/100) * Y in dB and the dB
//                     values are summed as-is.
//   tanh              each overlap contributes tanh(h*d), scaled by the mode
//                     pair's coupling relative to the strongest pair.
// A request with no overlapping aggressor has no crosstalk (-inf dB) and is
// always within threshold.

#ifndef MMFPLAN_XTALK_HPP_
#define MMFPLAN_XTALK_HPP_

#include <cstddef>
#include <vector>

#include "mmfplan/model.hpp"
#include "mmfplan/schedule.hpp"

namespace mmfplan::xtalk {

// tanh(h * z): fraction of power coupled after z meters.
double coupled_power_ratio(double h_per_m, double z_m);

// Contribution of one aggressor-mode / victim-mode overlap on one link, in the
// model's accumulation domain (power ratio, or dB for paper-literal-db).
// Throws kInvalidPair when aggressor == victim.
double pairwise_contribution(const CrosstalkMatrix& matrix, ModeIndex aggressor,
                             ModeIndex victim, double length_m,
                             const AccumulationModel& model);

// Converts an accumulated domain value to dB. `terms == 0` gives -inf.
double total_to_db(double accumulated, std::size_t terms,
                   const AccumulationModel& model);

// Whether an accumulated value stays within the threshold.
bool within_threshold(double accumulated, std::size_t terms,
                      double threshold_db, const AccumulationModel& model);

// Threshold expressed in the accumulation domain (what the linear
// constraint's right-hand side uses).
double threshold_in_domain(double threshold_db, const AccumulationModel& model);

struct Term {
  LinkIndex link = 0;
  RequestIndex aggressor_request = 0;
  ModeIndex aggressor_mode = 0;
  ModeIndex victim_mode = 0;
  double contribution = 0.0;     // accumulation domain
  double contribution_db = 0.0;  // same value in dB
};

struct CrosstalkReport {
  RequestIndex request = 0;
  std::vector<Term> terms;
  double accumulated = 0.0;
  double total_db = 0.0;  // -inf when terms is empty
  bool feasible = true;
};

// Sums every overlap (shared link, distinct modes, intersecting slot
// intervals) between the victim and the other accepted requests.
// Throws kNotScheduled when the victim is not accepted in `schedule`.
CrosstalkReport accumulate_for_request(RequestIndex victim,
                                       const Schedule& schedule,
                                       const Instance& instance);

// {request_id, total_db, feasible, terms: [{link, aggressor_request,
//  aggressor_mode, victim_mode, contribution_db}]}; -inf renders as "-inf".
Json to_json(const CrosstalkReport& report, const Instance& instance);

// Renders a dB value, using "-inf" for no crosstalk.
Json db_to_json(double db);

}  // namespace mmfplan::xtalk

#endif  // MMFPLAN_XTALK_HPP_
