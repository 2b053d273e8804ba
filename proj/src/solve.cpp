#include "mmfplan/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "mmfplan/xtalk.hpp"

namespace mmfplan::solve {

namespace {

std::vector<std::vector<ModeIndex>> mode_subsets(int modes, ModeSubsets kind) {
  std::vector<std::vector<ModeIndex>> out;
  if (kind == ModeSubsets::kContiguous) {
    for (int first = 0; first < modes; ++first) {
      for (int last = first; last < modes; ++last) {
        std::vector<ModeIndex> s(last - first + 1);
        std::iota(s.begin(), s.end(), first);
        out.push_back(std::move(s));
      }
    }
  } else {
    for (unsigned mask = 1; mask < (1u << modes); ++mask) {
      std::vector<ModeIndex> s;
      for (int m = 0; m < modes; ++m) {
        if (mask & (1u << m)) s.push_back(m);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

// Occupancy and crosstalk bookkeeping shared by the exact and greedy
// searches. Commits are undone in LIFO order.
class SearchState {
 public:
  explicit SearchState(const Instance& instance)
      : instance_(instance),
        slots_(instance.slot_count()),
        modes_(instance.mode_count),
        cells_per_link_(static_cast<std::size_t>(slots_) * modes_),
        occupancy_(instance.topology.link_count() * cells_per_link_, -1),
        link_requests_(instance.topology.link_count()),
        assigned_(instance.requests.size(), nullptr),
        xt_sum_(instance.requests.size(), 0.0),
        xt_terms_(instance.requests.size(), 0),
        coef_(instance.topology.link_count() * modes_ * modes_, 0.0) {
    const auto& model = instance.planner.accumulation;
    for (LinkIndex l = 0; l < instance.topology.link_count(); ++l) {
      const double len = instance.topology.links()[l].length_m;
      for (int a = 0; a < modes_; ++a) {
        for (int v = 0; v < modes_; ++v) {
          if (a == v) continue;
          coef_[(l * modes_ + a) * modes_ + v] =
              xtalk::pairwise_contribution(instance.crosstalk, a, v, len, model);
        }
      }
    }
  }

  struct Effect {
    RequestIndex request;
    double add;
    std::size_t terms;
  };

  // Checks slot exclusivity and, when `prune_crosstalk`, that neither the
  // new request nor any committed request ends up over the threshold.
  bool fits(RequestIndex r, const Assignment& a, bool prune_crosstalk) {
    for (LinkIndex l : a.path) {
      const int* cells = &occupancy_[l * cells_per_link_];
      for (ModeIndex m : a.modes) {
        for (int t = a.slot_start; t < a.slot_end; ++t) {
          if (cells[m * slots_ + t] >= 0) return false;
        }
      }
    }
    self_sum_ = 0.0;
    self_terms_ = 0;
    effects_.clear();
    for (LinkIndex l : a.path) {
      for (RequestIndex other : link_requests_[l]) {
        const Assignment& o = *assigned_[other];
        if (!a.overlaps_in_time(o)) continue;
        double add = 0.0;
        std::size_t n = 0;
        for (ModeIndex vm : a.modes) {
          for (ModeIndex am : o.modes) {
            if (am == vm) continue;
            self_sum_ += coef(l, am, vm);
            ++self_terms_;
            add += coef(l, vm, am);
            ++n;
          }
        }
        if (n == 0) continue;
        auto it = std::find_if(effects_.begin(), effects_.end(),
                               [&](const Effect& e) { return e.request == other; });
        if (it == effects_.end()) {
          effects_.push_back(Effect{other, add, n});
        } else {
          it->add += add;
          it->terms += n;
        }
      }
    }
    (void)r;
    if (!prune_crosstalk) return true;
    const double x = instance_.planner.xt_threshold_db;
    const auto& model = instance_.planner.accumulation;
    if (!xtalk::within_threshold(self_sum_, self_terms_, x, model)) return false;
    for (const Effect& e : effects_) {
      if (!xtalk::within_threshold(xt_sum_[e.request] + e.add,
                                   xt_terms_[e.request] + e.terms, x, model)) {
        return false;
      }
    }
    return true;
  }

  // Commits the assignment last passed to fits().
  void commit(RequestIndex r, const Assignment& a) {
    for (LinkIndex l : a.path) {
      int* cells = &occupancy_[l * cells_per_link_];
      for (ModeIndex m : a.modes) {
        for (int t = a.slot_start; t < a.slot_end; ++t) {
          cells[m * slots_ + t] = static_cast<int>(r);
        }
      }
      link_requests_[l].push_back(r);
    }
    assigned_[r] = &a;
    xt_sum_[r] = self_sum_;
    xt_terms_[r] = self_terms_;
    for (const Effect& e : effects_) {
      xt_sum_[e.request] += e.add;
      xt_terms_[e.request] += e.terms;
    }
    history_.push_back(Undo{r, effects_});
  }

  void undo() {
    Undo u = std::move(history_.back());
    history_.pop_back();
    const Assignment& a = *assigned_[u.request];
    for (LinkIndex l : a.path) {
      int* cells = &occupancy_[l * cells_per_link_];
      for (ModeIndex m : a.modes) {
        for (int t = a.slot_start; t < a.slot_end; ++t) {
          cells[m * slots_ + t] = -1;
        }
      }
      link_requests_[l].pop_back();
    }
    for (const Effect& e : u.effects) {
      xt_sum_[e.request] -= e.add;
      xt_terms_[e.request] -= e.terms;
    }
    assigned_[u.request] = nullptr;
    xt_sum_[u.request] = 0.0;
    xt_terms_[u.request] = 0;
  }

  bool all_within_threshold() const {
    const double x = instance_.planner.xt_threshold_db;
    const auto& model = instance_.planner.accumulation;
    for (RequestIndex r = 0; r < assigned_.size(); ++r) {
      if (assigned_[r] &&
          !xtalk::within_threshold(xt_sum_[r], xt_terms_[r], x, model)) {
        return false;
      }
    }
    return true;
  }

  std::size_t depth() const { return history_.size(); }

 private:
  struct Undo {
    RequestIndex request;
    std::vector<Effect> effects;
  };

  double coef(LinkIndex l, ModeIndex aggressor, ModeIndex victim) const {
    return coef_[(l * modes_ + aggressor) * modes_ + victim];
  }

  const Instance& instance_;
  int slots_;
  int modes_;
  std::size_t cells_per_link_;
  std::vector<int> occupancy_;
  std::vector<std::vector<RequestIndex>> link_requests_;
  std::vector<const Assignment*> assigned_;
  std::vector<double> xt_sum_;
  std::vector<std::size_t> xt_terms_;
  std::vector<double> coef_;
  double self_sum_ = 0.0;
  std::size_t self_terms_ = 0;
  std::vector<Effect> effects_;
  std::vector<Undo> history_;
};

Assignment to_assignment(RequestIndex r, const Candidate& c) {
  return Assignment{r, c.path.links, c.modes, c.slot_start, c.slot_end};
}

std::vector<RequestIndex> request_order(const Instance& instance,
                                        OrderPolicy policy) {
  std::vector<RequestIndex> order(instance.requests.size());
  std::iota(order.begin(), order.end(), 0);
  if (policy == OrderPolicy::kBandwidthDesc) {
    std::stable_sort(order.begin(), order.end(),
                     [&](RequestIndex a, RequestIndex b) {
                       const Request& ra = instance.requests[a];
                       const Request& rb = instance.requests[b];
                       if (std::abs(ra.bandwidth_gbps - rb.bandwidth_gbps) > kEps) {
                         return ra.bandwidth_gbps > rb.bandwidth_gbps;
                       }
                       return ra.id < rb.id;
                     });
  }
  return order;
}

Schedule finish(const Instance& instance, std::vector<Assignment> accepted,
                bool optimal) {
  Schedule s;
  std::sort(accepted.begin(), accepted.end(),
            [](const Assignment& a, const Assignment& b) {
              return a.request < b.request;
            });
  std::vector<char> taken(instance.requests.size(), 0);
  for (const Assignment& a : accepted) taken[a.request] = 1;
  for (RequestIndex r = 0; r < instance.requests.size(); ++r) {
    if (!taken[r]) s.rejected.push_back(r);
  }
  s.accepted = std::move(accepted);
  s.optimal = optimal;
  s.refresh_objective(instance);
  return s;
}

// Objective value in the comparable form used by the search.
struct Score {
  double throughput = 0.0;
  std::int64_t lambda = 0;
};

class Objective {
 public:
  explicit Objective(const Instance& instance)
      : weighted_(instance.planner.objective.kind == ObjectiveKind::kWeighted),
        weights_(objective_weights(instance)) {}

  bool better(const Score& a, const Score& b) const {
    if (weighted_) {
      const double va = value(a), vb = value(b);
      return va > vb + 1e-12 * std::max(1.0, std::abs(vb));
    }
    if (a.throughput > b.throughput + kEps) return true;
    if (a.throughput < b.throughput - kEps) return false;
    return a.lambda < b.lambda;
  }

  // Whether a subtree whose throughput can reach at most `tp_bound` and whose
  // lambda count is at least `lambda_current` (`lambda_if_all` if every
  // remaining request is accepted) may still beat `incumbent`.
  bool may_improve(double tp_bound, std::int64_t lambda_current,
                   std::int64_t lambda_if_all, const Score& incumbent) const {
    if (weighted_) {
      const double ub = weights_.eta1 * tp_bound -
                        weights_.eta2 * static_cast<double>(lambda_current);
      const double inc = value(incumbent);
      return ub > inc + 1e-12 * std::max(1.0, std::abs(inc));
    }
    if (tp_bound > incumbent.throughput + kEps) return true;
    if (tp_bound < incumbent.throughput - kEps) return false;
    return lambda_if_all < incumbent.lambda;
  }

 private:
  double value(const Score& s) const {
    return weights_.eta1 * s.throughput -
           weights_.eta2 * static_cast<double>(s.lambda);
  }

  bool weighted_;
  Weights weights_;
};

class BranchAndBound {
 public:
  BranchAndBound(const Instance& instance, const SolveLimits& limits)
      : instance_(instance),
        limits_(limits),
        objective_(instance),
        state_(instance),
        prune_crosstalk_(instance.planner.accumulation.kind !=
                         AccumulationKind::kLiteralDb),
        start_(std::chrono::steady_clock::now()) {
    for (RequestIndex r : request_order(instance, OrderPolicy::kBandwidthDesc)) {
      auto cands = enumerate_candidates(instance, r, limits.k_paths,
                                        limits.mode_subsets);
      if (cands.empty()) continue;
      std::vector<Assignment> as;
      std::int64_t min_lambda = cands.front().lambda_count();
      for (const Candidate& c : cands) {
        as.push_back(to_assignment(r, c));
        min_lambda = std::min(min_lambda, c.lambda_count());
      }
      order_.push_back(r);
      candidates_.push_back(std::move(as));
      min_lambda_.push_back(min_lambda);
    }
    const std::size_t n = order_.size();
    rem_tp_.assign(n + 1, 0.0);
    rem_lambda_.assign(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
      rem_tp_[i] = rem_tp_[i + 1] + instance.requests[order_[i]].bandwidth_gbps;
      rem_lambda_[i] = rem_lambda_[i + 1] + min_lambda_[i];
    }
  }

  void seed(const Schedule& warm) {
    std::vector<Assignment> sorted = warm.accepted;
    std::sort(sorted.begin(), sorted.end(),
              [](const Assignment& a, const Assignment& b) {
                return a.request < b.request;
              });
    std::size_t committed = 0;
    bool ok = true;
    for (const Assignment& a : sorted) {
      if (!valid_shape(a) || !state_.fits(a.request, a, prune_crosstalk_)) {
        ok = false;
        break;
      }
      state_.commit(a.request, a);
      ++committed;
    }
    if (ok && !prune_crosstalk_) ok = state_.all_within_threshold();
    while (committed-- > 0) state_.undo();
    if (!ok) return;
    Score s;
    for (const Assignment& a : sorted) {
      s.throughput += instance_.requests[a.request].bandwidth_gbps;
      s.lambda += a.lambda_count();
    }
    if (objective_.better(s, best_score_)) {
      best_score_ = s;
      best_ = std::move(sorted);
    }
  }

  Schedule run() {
    std::vector<const Assignment*> chosen;
    dfs(0, Score{}, chosen);
    return finish(instance_, best_, !stopped_);
  }

 private:
  bool valid_shape(const Assignment& a) const {
    const int slots = instance_.slot_count();
    if (a.request >= instance_.requests.size()) return false;
    if (a.slot_start < 0 || a.slot_end > slots || a.slot_start >= a.slot_end) {
      return false;
    }
    for (ModeIndex m : a.modes) {
      if (m < 0 || m >= instance_.mode_count) return false;
    }
    for (LinkIndex l : a.path) {
      if (l >= instance_.topology.link_count()) return false;
    }
    return a.supply() >= instance_.slot_units(a.request);
  }

  bool out_of_budget() {
    if (++nodes_ > limits_.node_budget) return true;
    if ((nodes_ & 1023) == 0) {
      const std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - start_;
      if (elapsed.count() > limits_.wall_clock_s) return true;
    }
    return false;
  }

  void dfs(std::size_t depth, Score score,
           std::vector<const Assignment*>& chosen) {
    if (stopped_) return;
    if (depth == order_.size()) {
      if (!prune_crosstalk_ && !state_.all_within_threshold()) return;
      if (objective_.better(score, best_score_)) {
        best_score_ = score;
        best_.clear();
        for (const Assignment* a : chosen) best_.push_back(*a);
      }
      return;
    }
    if (!objective_.may_improve(score.throughput + rem_tp_[depth], score.lambda,
                                score.lambda + rem_lambda_[depth], best_score_)) {
      return;
    }
    const RequestIndex r = order_[depth];
    const double bw = instance_.requests[r].bandwidth_gbps;
    for (const Assignment& a : candidates_[depth]) {
      if (out_of_budget()) {
        stopped_ = true;
        return;
      }
      if (!state_.fits(r, a, prune_crosstalk_)) continue;
      state_.commit(r, a);
      chosen.push_back(&a);
      dfs(depth + 1, Score{score.throughput + bw, score.lambda + a.lambda_count()},
          chosen);
      chosen.pop_back();
      state_.undo();
      if (stopped_) return;
    }
    dfs(depth + 1, score, chosen);
  }

  const Instance& instance_;
  SolveLimits limits_;
  Objective objective_;
  SearchState state_;
  bool prune_crosstalk_;
  std::chrono::steady_clock::time_point start_;

  std::vector<RequestIndex> order_;
  std::vector<std::vector<Assignment>> candidates_;
  std::vector<std::int64_t> min_lambda_;
  std::vector<double> rem_tp_;
  std::vector<std::int64_t> rem_lambda_;

  Score best_score_;
  std::vector<Assignment> best_;
  std::int64_t nodes_ = 0;
  bool stopped_ = false;
};

bool lex_better(const Schedule& a, const Schedule& b) {
  if (a.throughput_gbps > b.throughput_gbps + kEps) return true;
  if (a.throughput_gbps < b.throughput_gbps - kEps) return false;
  return a.lambda_count < b.lambda_count;
}

}  // namespace

Weights objective_weights(const Instance& instance) {
  Weights w;
  const auto& obj = instance.planner.objective;
  w.eta1 = obj.eta1.value_or(1.0);
  if (obj.eta2) {
    w.eta2 = *obj.eta2;
  } else {
    double max_bw = 0.0;
    for (const Request& r : instance.requests) {
      max_bw = std::max(max_bw, r.bandwidth_gbps);
    }
    const double cells = static_cast<double>(instance.requests.size()) *
                         static_cast<double>(instance.topology.link_count()) *
                         instance.mode_count * instance.slot_count();
    w.eta2 = 1.0 / (cells * max_bw + 1.0);
  }
  return w;
}

std::vector<Candidate> enumerate_candidates(const Instance& instance,
                                            RequestIndex request, int k,
                                            ModeSubsets subsets) {
  const Request& req = instance.requests.at(request);
  const int q = instance.slot_units(request);
  const int slots = instance.slot_count();
  const auto paths =
      k_shortest_paths(instance.topology, req.source, req.destination, k);
  const auto mode_sets = mode_subsets(instance.mode_count, subsets);

  std::vector<Candidate> out;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (const auto& modes : mode_sets) {
      const int width = static_cast<int>(modes.size());
      for (int len = 1; len <= slots; ++len) {
        const int supply = width * len;
        if (supply < q || supply - q >= std::min(width, len)) continue;
        for (int start = 0; start + len <= slots; ++start) {
          out.push_back(Candidate{static_cast<int>(p), paths[p], modes, start,
                                  start + len});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.supply() != b.supply()) return a.supply() < b.supply();
    if (a.path_rank != b.path_rank) return a.path_rank < b.path_rank;
    if (a.slot_start != b.slot_start) return a.slot_start < b.slot_start;
    if (a.modes != b.modes) return a.modes < b.modes;
    return a.slot_end < b.slot_end;
  });
  return out;
}

Schedule solve_exact(const Instance& instance, const SolveLimits& limits,
                     const Schedule* warm_start) {
  BranchAndBound bnb(instance, limits);
  if (warm_start) bnb.seed(*warm_start);
  return bnb.run();
}

Schedule solve_greedy(const Instance& instance, const SolveLimits& limits,
                      OrderPolicy order) {
  SearchState state(instance);
  std::vector<Assignment> accepted;
  accepted.reserve(instance.requests.size());
  for (RequestIndex r : request_order(instance, order)) {
    for (const Candidate& c : enumerate_candidates(instance, r, limits.k_paths,
                                                   limits.mode_subsets)) {
      Assignment a = to_assignment(r, c);
      if (state.fits(r, a, true)) {
        accepted.push_back(std::move(a));
        state.commit(r, accepted.back());
        break;
      }
    }
  }
  return finish(instance, std::move(accepted), false);
}

Schedule solve_baseline_conventional(const Instance& instance,
                                     const SolveLimits& limits) {
  const Instance single = collapse_to_single_slot(instance);
  Schedule exact = solve_exact(single, limits);
  if (exact.optimal) return exact;
  Schedule greedy = solve_greedy(single, limits);
  return lex_better(greedy, exact) ? greedy : exact;
}

Schedule lift_single_slot_schedule(const Schedule& single_slot,
                                   const Instance& instance) {
  std::vector<Assignment> lifted;
  for (const Assignment& a : single_slot.accepted) {
    Assignment b = a;
    const int q = instance.slot_units(a.request);
    const int width = std::max<int>(1, static_cast<int>(a.modes.size()));
    b.slot_start = 0;
    b.slot_end = std::min(instance.slot_count(), (q + width - 1) / width);
    lifted.push_back(std::move(b));
  }
  return finish(instance, std::move(lifted), false);
}

}  // namespace mmfplan::solve
