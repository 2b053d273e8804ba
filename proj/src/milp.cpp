#include "mmfplan/milp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

#include "mmfplan/solve.hpp"
#include "mmfplan/xtalk.hpp"

namespace mmfplan::milp {

VarId MilpModel::add_variable(std::string name, std::string family,
                              VarKind kind) {
  Variable v;
  v.name = std::move(name);
  v.family = std::move(family);
  v.kind = kind;
  variables_.push_back(std::move(v));
  return variables_.size() - 1;
}

void MilpModel::add_constraint(Constraint c) {
  constraints_.push_back(std::move(c));
}

namespace {

bool holds(double lhs, Sense sense, double rhs) {
  const double tol = 1e-7 * std::max(1.0, std::abs(rhs));
  switch (sense) {
    case Sense::kLe: return lhs <= rhs + tol;
    case Sense::kGe: return lhs >= rhs - tol;
    case Sense::kEq: return std::abs(lhs - rhs) <= tol;
  }
  return false;
}

double lhs_of(const Constraint& c, const std::vector<double>& values) {
  double lhs = 0.0;
  for (const Term& t : c.terms) lhs += t.coef * values[t.var];
  return lhs;
}

}  // namespace

std::vector<std::string> MilpModel::violated(const std::vector<double>& values,
                                             bool include_phase2) const {
  std::vector<std::string> out;
  if (values.size() != variables_.size()) {
    out.push_back("<value vector size mismatch>");
    return out;
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const Variable& v = variables_[i];
    const double x = values[i];
    if (x < v.lower - 1e-9 || x > v.upper + 1e-9) {
      out.push_back("bounds:" + v.name);
    } else if (v.kind == VarKind::kBinary &&
               std::abs(x - std::round(x)) > 1e-9) {
      out.push_back("integrality:" + v.name);
    }
  }
  for (const Constraint& c : constraints_) {
    if (!holds(lhs_of(c, values), c.sense, c.rhs)) out.push_back(c.name);
  }
  if (include_phase2 && phase2_floor &&
      !holds(lhs_of(*phase2_floor, values), phase2_floor->sense,
             phase2_floor->rhs)) {
    out.push_back(phase2_floor->name);
  }
  return out;
}

void MilpModel::check_well_formed() const {
  std::vector<std::string> problems;
  std::unordered_set<std::string> names;
  for (const Variable& v : variables_) {
    if (!names.insert(v.name).second) {
      problems.push_back("duplicate variable name " + v.name);
    }
  }
  std::unordered_set<std::string> cnames;
  auto check_terms = [&](const std::string& owner, const std::vector<Term>& ts) {
    for (const Term& t : ts) {
      if (t.var >= variables_.size()) {
        problems.push_back(owner + " references an undeclared variable");
      }
    }
  };
  for (const Constraint& c : constraints_) {
    if (!cnames.insert(c.name).second) {
      problems.push_back("duplicate constraint name " + c.name);
    }
    check_terms(c.name, c.terms);
  }
  check_terms("objective", objective.terms);
  if (phase2_objective) check_terms("phase2 objective", phase2_objective->terms);
  if (phase2_floor) check_terms(phase2_floor->name, phase2_floor->terms);
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

VariableIndex::VariableIndex(std::size_t requests, std::size_t links, int modes,
                             int slots)
    : R_(requests), E_(links), M_(modes), T_(slots) {
  const std::size_t pairs = R_ > 0 ? R_ * (R_ - 1) : 0;
  const std::size_t mpairs = M_ > 0 ? M_ * (M_ - 1) : 0;
  std::size_t at = 0;
  lambda_ = at;   at += R_ * E_ * M_ * T_;
  rho_ = at;      at += R_;
  beta_ = at;     at += pairs * E_ * mpairs * T_;
  theta_ = at;    at += pairs * E_ * mpairs;
  c_mode_ = at;   at += R_ * E_ * M_ * (T_ + 1);
  occ_ = at;      at += R_ * E_ * T_;
  c_any_ = at;    at += R_ * E_ * (T_ + 1);
  use_mode_ = at; at += R_ * E_ * M_;
  use_link_ = at; at += R_ * E_;
  total_ = at;
}

std::size_t VariableIndex::pair(RequestIndex r1, RequestIndex r2) const {
  return r1 * (R_ - 1) + (r2 < r1 ? r2 : r2 - 1);
}

std::size_t VariableIndex::mode_pair(ModeIndex m1, ModeIndex m2) const {
  const std::size_t a = static_cast<std::size_t>(m1);
  const std::size_t b = static_cast<std::size_t>(m2);
  return a * (M_ - 1) + (b < a ? b : b - 1);
}

VarId VariableIndex::lambda(RequestIndex r, LinkIndex e, ModeIndex m, int t) const {
  return lambda_ + ((r * E_ + e) * M_ + m) * T_ + t;
}
VarId VariableIndex::rho(RequestIndex r) const { return rho_ + r; }
VarId VariableIndex::beta(RequestIndex r1, RequestIndex r2, LinkIndex e,
                          ModeIndex m1, ModeIndex m2, int t) const {
  const std::size_t mp = M_ * (M_ - 1);
  return beta_ + ((pair(r1, r2) * E_ + e) * mp + mode_pair(m1, m2)) * T_ + t;
}
VarId VariableIndex::theta(RequestIndex r1, RequestIndex r2, LinkIndex e,
                           ModeIndex m1, ModeIndex m2) const {
  const std::size_t mp = M_ * (M_ - 1);
  return theta_ + (pair(r1, r2) * E_ + e) * mp + mode_pair(m1, m2);
}
VarId VariableIndex::c_mode(RequestIndex r, LinkIndex e, ModeIndex m, int k) const {
  return c_mode_ + ((r * E_ + e) * M_ + m) * (T_ + 1) + k;
}
VarId VariableIndex::occ(RequestIndex r, LinkIndex e, int t) const {
  return occ_ + (r * E_ + e) * T_ + t;
}
VarId VariableIndex::c_any(RequestIndex r, LinkIndex e, int k) const {
  return c_any_ + (r * E_ + e) * (T_ + 1) + k;
}
VarId VariableIndex::use_mode(RequestIndex r, LinkIndex e, ModeIndex m) const {
  return use_mode_ + (r * E_ + e) * M_ + m;
}
VarId VariableIndex::use_link(RequestIndex r, LinkIndex e) const {
  return use_link_ + r * E_ + e;
}

std::int64_t FormulaCounts::total_variables() const {
  std::int64_t n = 0;
  for (const auto& [k, v] : variables) n += v;
  return n;
}

std::int64_t FormulaCounts::total_constraints() const {
  std::int64_t n = 0;
  for (const auto& [k, v] : constraints) n += v;
  return n;
}

FormulaCounts count_formulas(const Instance& instance) {
  const std::int64_t R = static_cast<std::int64_t>(instance.requests.size());
  const std::int64_t E = static_cast<std::int64_t>(instance.topology.link_count());
  const std::int64_t N = static_cast<std::int64_t>(instance.topology.node_count());
  const std::int64_t M = instance.mode_count;
  const std::int64_t T = instance.slot_count();
  const std::int64_t K = T + 1;
  const std::int64_t P = R * (R > 0 ? R - 1 : 0);
  const std::int64_t Q = M * (M - 1);

  FormulaCounts c;
  c.variables = {
      {"lambda", R * E * M * T}, {"rho", R},         {"beta", P * E * Q * T},
      {"theta", P * E * Q},      {"c_mode", R * E * M * K},
      {"occ", R * E * T},        {"c_any", R * E * K},
      {"use_mode", R * E * M},   {"use_link", R * E},
  };
  c.constraints = {
      {"eq2", R * (N + 2)},
      {"eq3", R * T},
      {"eq4", R * T * (N - 2)},
      {"eq5", R * T * M},
      {"eq6", R * T * M * (N - 2)},
      {"eq7", R > 0 ? E * M * T : 0},
      {"eq8", R * E * M * (2 * K + 1)},
      {"eq9", R * E * (M * T + T + (2 * K + 1) + M * T + M + M * T)},
      {"eq10", R * E * (T + 2)},
      {"eq11", R},
      {"eq12", 2 * P * E * Q},
      {"eq13", P * E * Q * T},
      {"eq14", P * E * Q * T},
      {"eq15", P * E * Q * T},
  };
  return c;
}

FormulaCounts tally(const MilpModel& model) {
  FormulaCounts c = {};
  // Start from the closed-form key set so absent families read as zero.
  for (const char* f : {"lambda", "rho", "beta", "theta", "c_mode", "occ",
                        "c_any", "use_mode", "use_link"}) {
    c.variables[f] = 0;
  }
  for (const char* f : {"eq2", "eq3", "eq4", "eq5", "eq6", "eq7", "eq8", "eq9",
                        "eq10", "eq11", "eq12", "eq13", "eq14", "eq15"}) {
    c.constraints[f] = 0;
  }
  for (const Variable& v : model.variables()) ++c.variables[v.family];
  for (const Constraint& k : model.constraints()) ++c.constraints[k.family];
  return c;
}

namespace {

// LP names allow a limited alphabet; everything else becomes '_'.
std::string tok(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '.';
    if (!ok) ch = '_';
  }
  return out;
}

class Builder {
 public:
  Builder(const Instance& instance, const BuildOptions& options)
      : inst_(instance),
        opts_(options),
        topo_(instance.topology),
        R_(instance.requests.size()),
        E_(instance.topology.link_count()),
        N_(instance.topology.node_count()),
        M_(instance.mode_count),
        T_(instance.slot_count()),
        in_(N_) {
    for (LinkIndex e = 0; e < E_; ++e) in_[topo_.links()[e].to].push_back(e);
    rid_.reserve(R_);
    for (const Request& r : instance.requests) rid_.push_back(tok(r.id));
    for (LinkIndex e = 0; e < E_; ++e) {
      const Link& l = topo_.links()[e];
      eid_.push_back(tok(topo_.nodes()[l.from].id) + "_" +
                     tok(topo_.nodes()[l.to].id));
    }
    for (const Node& n : topo_.nodes()) nid_.push_back(tok(n.id));
  }

  BuiltModel build() {
    BuiltModel out;
    out.index = VariableIndex(R_, E_, M_, T_);
    idx_ = &out.index;
    model_ = &out.model;
    declare_variables();
    flow_conservation();
    slot_continuity();
    mode_continuity();
    slot_exclusivity();
    mode_contiguity();
    cross_mode_equality();
    capacity();
    crosstalk();
    overlap_definitions();
    objective();
    return out;
  }

 private:
  // Repeated variables are merged and cancelled terms dropped, so a row may
  // end up empty (it is still emitted to keep the counts fixed).
  void add(std::string name, const char* family, std::vector<Term> terms,
           Sense sense, double rhs) {
    std::vector<Term> merged;
    for (const Term& t : terms) {
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&](const Term& m) { return m.var == t.var; });
      if (it == merged.end()) {
        merged.push_back(t);
      } else {
        it->coef += t.coef;
      }
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
    model_->add_constraint(
        Constraint{std::move(name), family, std::move(merged), sense, rhs});
  }

  std::string lam_name(RequestIndex r, LinkIndex e, ModeIndex m, int t) const {
    return fmt::format("l_r{}_e{}_m{}_t{}", rid_[r], eid_[e], m + 1, t);
  }

  void declare_variables() {
    for (RequestIndex r = 0; r < R_; ++r)
      for (LinkIndex e = 0; e < E_; ++e)
        for (int m = 0; m < M_; ++m)
          for (int t = 0; t < T_; ++t)
            model_->add_variable(lam_name(r, e, m, t), "lambda");
    for (RequestIndex r = 0; r < R_; ++r) {
      model_->add_variable("rho_r" + rid_[r], "rho");
    }
    for (RequestIndex r1 = 0; r1 < R_; ++r1)
      for (RequestIndex r2 = 0; r2 < R_; ++r2) {
        if (r1 == r2) continue;
        for (LinkIndex e = 0; e < E_; ++e)
          for (int m1 = 0; m1 < M_; ++m1)
            for (int m2 = 0; m2 < M_; ++m2) {
              if (m1 == m2) continue;
              for (int t = 0; t < T_; ++t) {
                model_->add_variable(
                    fmt::format("b_r{}_r{}_e{}_m{}_m{}_t{}", rid_[r1], rid_[r2],
                                eid_[e], m1 + 1, m2 + 1, t),
                    "beta");
              }
            }
      }
    for (RequestIndex r1 = 0; r1 < R_; ++r1)
      for (RequestIndex r2 = 0; r2 < R_; ++r2) {
        if (r1 == r2) continue;
        for (LinkIndex e = 0; e < E_; ++e)
          for (int m1 = 0; m1 < M_; ++m1)
            for (int m2 = 0; m2 < M_; ++m2) {
              if (m1 == m2) continue;
              model_->add_variable(fmt::format("th_r{}_r{}_e{}_m{}_m{}", rid_[r1],
                                               rid_[r2], eid_[e], m1 + 1, m2 + 1),
                                   "theta");
            }
      }
    for (RequestIndex r = 0; r < R_; ++r)
      for (LinkIndex e = 0; e < E_; ++e)
        for (int m = 0; m < M_; ++m)
          for (int k = 0; k <= T_; ++k)
            model_->add_variable(
                fmt::format("cm_r{}_e{}_m{}_k{}", rid_[r], eid_[e], m + 1, k),
                "c_mode");
    for (RequestIndex r = 0; r < R_; ++r)
      for (LinkIndex e = 0; e < E_; ++e)
        for (int t = 0; t < T_; ++t)
          model_->add_variable(fmt::format("u_r{}_e{}_t{}", rid_[r], eid_[e], t),
                               "occ");
    for (RequestIndex r = 0; r < R_; ++r)
      for (LinkIndex e = 0; e < E_; ++e)
        for (int k = 0; k <= T_; ++k)
          model_->add_variable(fmt::format("ca_r{}_e{}_k{}", rid_[r], eid_[e], k),
                               "c_any");
    for (RequestIndex r = 0; r < R_; ++r)
      for (LinkIndex e = 0; e < E_; ++e)
        for (int m = 0; m < M_; ++m)
          model_->add_variable(fmt::format("w_r{}_e{}_m{}", rid_[r], eid_[e], m + 1),
                               "use_mode");
    for (RequestIndex r = 0; r < R_; ++r)
      for (LinkIndex e = 0; e < E_; ++e)
        model_->add_variable(fmt::format("y_r{}_e{}", rid_[r], eid_[e]), "use_link");
  }

  // Net cell outflow at each node; slot units at the endpoints.
  void flow_conservation() {
    for (RequestIndex r = 0; r < R_; ++r) {
      const Request& req = inst_.requests[r];
      const double q = inst_.slot_units(r);
      for (NodeIndex n = 0; n < N_; ++n) {
        std::vector<Term> terms;
        for (LinkIndex e : topo_.out_links(n))
          for (int m = 0; m < M_; ++m)
            for (int t = 0; t < T_; ++t) terms.push_back({idx_->lambda(r, e, m, t), 1.0});
        for (LinkIndex e : in_[n])
          for (int m = 0; m < M_; ++m)
            for (int t = 0; t < T_; ++t) terms.push_back({idx_->lambda(r, e, m, t), -1.0});
        const std::string base = fmt::format("eq2_r{}_n{}", rid_[r], nid_[n]);
        if (n == req.source) {
          const double cap = static_cast<double>(M_) * T_ * topo_.out_links(n).size();
          auto lo = terms;
          lo.push_back({idx_->rho(r), -q});
          add(base + "_lo", "eq2", std::move(lo), Sense::kGe, 0.0);
          terms.push_back({idx_->rho(r), -cap});
          add(base + "_hi", "eq2", std::move(terms), Sense::kLe, 0.0);
        } else if (n == req.destination) {
          const double cap = static_cast<double>(M_) * T_ * in_[n].size();
          auto lo = terms;
          lo.push_back({idx_->rho(r), q});
          add(base + "_lo", "eq2", std::move(lo), Sense::kLe, 0.0);
          terms.push_back({idx_->rho(r), cap});
          add(base + "_hi", "eq2", std::move(terms), Sense::kGe, 0.0);
        } else {
          add(base, "eq2", std::move(terms), Sense::kEq, 0.0);
        }
      }
    }
  }

  // Aggregate over modes: per-slot continuity.
  void slot_continuity() {
    for (RequestIndex r = 0; r < R_; ++r) {
      const Request& req = inst_.requests[r];
      for (int t = 0; t < T_; ++t) {
        std::vector<Term> terms;
        for (LinkIndex e : topo_.out_links(req.source))
          for (int m = 0; m < M_; ++m) terms.push_back({idx_->lambda(r, e, m, t), 1.0});
        for (LinkIndex e : in_[req.destination])
          for (int m = 0; m < M_; ++m) terms.push_back({idx_->lambda(r, e, m, t), -1.0});
        add(fmt::format("eq3_r{}_t{}", rid_[r], t), "eq3", std::move(terms),
            Sense::kEq, 0.0);
      }
    }
    for (RequestIndex r = 0; r < R_; ++r) {
      const Request& req = inst_.requests[r];
      for (NodeIndex z = 0; z < N_; ++z) {
        if (z == req.source || z == req.destination) continue;
        for (int t = 0; t < T_; ++t) {
          std::vector<Term> terms;
          for (LinkIndex e : topo_.out_links(z))
            for (int m = 0; m < M_; ++m) terms.push_back({idx_->lambda(r, e, m, t), 1.0});
          for (LinkIndex e : in_[z])
            for (int m = 0; m < M_; ++m) terms.push_back({idx_->lambda(r, e, m, t), -1.0});
          add(fmt::format("eq4_r{}_n{}_t{}", rid_[r], nid_[z], t), "eq4",
              std::move(terms), Sense::kEq, 0.0);
        }
      }
    }
  }

  // Per (mode, slot) continuity; implies the mode-index-weighted sums.
  void mode_continuity() {
    for (RequestIndex r = 0; r < R_; ++r) {
      const Request& req = inst_.requests[r];
      for (int t = 0; t < T_; ++t)
        for (int m = 0; m < M_; ++m) {
          std::vector<Term> terms;
          for (LinkIndex e : topo_.out_links(req.source))
            terms.push_back({idx_->lambda(r, e, m, t), 1.0});
          for (LinkIndex e : in_[req.destination])
            terms.push_back({idx_->lambda(r, e, m, t), -1.0});
          add(fmt::format("eq5_r{}_m{}_t{}", rid_[r], m + 1, t), "eq5",
              std::move(terms), Sense::kEq, 0.0);
        }
    }
    for (RequestIndex r = 0; r < R_; ++r) {
      const Request& req = inst_.requests[r];
      for (NodeIndex z = 0; z < N_; ++z) {
        if (z == req.source || z == req.destination) continue;
        for (int t = 0; t < T_; ++t)
          for (int m = 0; m < M_; ++m) {
            std::vector<Term> terms;
            for (LinkIndex e : topo_.out_links(z))
              terms.push_back({idx_->lambda(r, e, m, t), 1.0});
            for (LinkIndex e : in_[z]) terms.push_back({idx_->lambda(r, e, m, t), -1.0});
            add(fmt::format("eq6_r{}_n{}_m{}_t{}", rid_[r], nid_[z], m + 1, t),
                "eq6", std::move(terms), Sense::kEq, 0.0);
          }
      }
    }
  }

  void slot_exclusivity() {
    if (R_ == 0) return;
    for (LinkIndex e = 0; e < E_; ++e)
      for (int m = 0; m < M_; ++m)
        for (int t = 0; t < T_; ++t) {
          std::vector<Term> terms;
          for (RequestIndex r = 0; r < R_; ++r) terms.push_back({idx_->lambda(r, e, m, t), 1.0});
          add(fmt::format("eq7_e{}_m{}_t{}", eid_[e], m + 1, t), "eq7",
              std::move(terms), Sense::kLe, 1.0);
        }
  }

  // |x_k - x_{k-1}| <= c_k over boundaries 0..T with empty virtual slots, and
  // at most two transitions.
  template <typename SlotVar, typename TransVar>
  void transitions(const std::string& base, const char* family, SlotVar slot,
                   TransVar trans) {
    std::vector<Term> sum;
    for (int k = 0; k <= T_; ++k) {
      std::vector<Term> up{{trans(k), 1.0}};
      std::vector<Term> down{{trans(k), 1.0}};
      if (k < T_) {
        up.push_back({slot(k), -1.0});
        down.push_back({slot(k), 1.0});
      }
      if (k > 0) {
        up.push_back({slot(k - 1), 1.0});
        down.push_back({slot(k - 1), -1.0});
      }
      add(fmt::format("{}_up_k{}", base, k), family, std::move(up), Sense::kGe, 0.0);
      add(fmt::format("{}_dn_k{}", base, k), family, std::move(down), Sense::kGe, 0.0);
      sum.push_back({trans(k), 1.0});
    }
    add(base + "_sum", family, std::move(sum), Sense::kLe, 2.0);
  }

  void mode_contiguity() {
    for (RequestIndex r = 0; r < R_; ++r)
      for (LinkIndex e = 0; e < E_; ++e)
        for (int m = 0; m < M_; ++m) {
          transitions(fmt::format("eq8_r{}_e{}_m{}", rid_[r], eid_[e], m + 1), "eq8",
                      [&](int t) { return idx_->lambda(r, e, m, t); },
                      [&](int k) { return idx_->c_mode(r, e, m, k); });
        }
  }

  void cross_mode_equality() {
    for (RequestIndex r = 0; r < R_; ++r)
      for (LinkIndex e = 0; e < E_; ++e) {
        const std::string base = fmt::format("eq9_r{}_e{}", rid_[r], eid_[e]);
        for (int t = 0; t < T_; ++t) {
          std::vector<Term> sum{{idx_->occ(r, e, t), 1.0}};
          for (int m = 0; m < M_; ++m) {
            add(fmt::format("{}_occ_m{}_t{}", base, m + 1, t), "eq9",
                {{idx_->occ(r, e, t), 1.0}, {idx_->lambda(r, e, m, t), -1.0}},
                Sense::kGe, 0.0);
            sum.push_back({idx_->lambda(r, e, m, t), -1.0});
          }
          add(fmt::format("{}_occ_t{}", base, t), "eq9", std::move(sum), Sense::kLe, 0.0);
        }
        transitions(base + "_any", "eq9", [&](int t) { return idx_->occ(r, e, t); },
                    [&](int k) { return idx_->c_any(r, e, k); });
        for (int m = 0; m < M_; ++m) {
          std::vector<Term> sum{{idx_->use_mode(r, e, m), 1.0}};
          for (int t = 0; t < T_; ++t) {
            add(fmt::format("{}_use_m{}_t{}", base, m + 1, t), "eq9",
                {{idx_->use_mode(r, e, m), 1.0}, {idx_->lambda(r, e, m, t), -1.0}},
                Sense::kGe, 0.0);
            sum.push_back({idx_->lambda(r, e, m, t), -1.0});
          }
          add(fmt::format("{}_use_m{}", base, m + 1), "eq9", std::move(sum),
              Sense::kLe, 0.0);
        }
        for (int m = 0; m < M_; ++m)
          for (int t = 0; t < T_; ++t) {
            add(fmt::format("{}_same_m{}_t{}", base, m + 1, t), "eq9",
                {{idx_->lambda(r, e, m, t), 1.0},
                 {idx_->occ(r, e, t), -1.0},
                 {idx_->use_mode(r, e, m), -1.0}},
                Sense::kGe, -1.0);
          }
      }
  }

  void capacity() {
    const double big_m = inst_.big_m();
    for (RequestIndex r = 0; r < R_; ++r) {
      const double q = inst_.slot_units(r);
      const double cover = std::max(big_m, q);
      for (LinkIndex e = 0; e < E_; ++e) {
        const std::string base = fmt::format("eq10_r{}_e{}", rid_[r], eid_[e]);
        std::vector<Term> any{{idx_->use_link(r, e), 1.0}};
        for (int t = 0; t < T_; ++t) {
          add(fmt::format("{}_use_t{}", base, t), "eq10",
              {{idx_->use_link(r, e), 1.0}, {idx_->occ(r, e, t), -1.0}}, Sense::kGe,
              0.0);
          any.push_back({idx_->occ(r, e, t), -1.0});
        }
        add(base + "_use", "eq10", std::move(any), Sense::kLe, 0.0);
        std::vector<Term> supply;
        for (int m = 0; m < M_; ++m)
          for (int t = 0; t < T_; ++t) supply.push_back({idx_->lambda(r, e, m, t), 1.0});
        supply.push_back({idx_->use_link(r, e), -cover});
        add(base, "eq10", std::move(supply), Sense::kGe, q - cover);
      }
    }
  }

  void crosstalk() {
    const auto& model = inst_.planner.accumulation;
    const double rhs =
        xtalk::threshold_in_domain(inst_.planner.xt_threshold_db, model);
    for (RequestIndex r1 = 0; r1 < R_; ++r1) {
      std::vector<Term> terms;
      for (RequestIndex r2 = 0; r2 < R_; ++r2) {
        if (r1 == r2) continue;
        for (LinkIndex e = 0; e < E_; ++e) {
          const double len = topo_.links()[e].length_m;
          for (int m1 = 0; m1 < M_; ++m1)
            for (int m2 = 0; m2 < M_; ++m2) {
              if (m1 == m2) continue;
              terms.push_back({idx_->theta(r1, r2, e, m1, m2),
                               xtalk::pairwise_contribution(inst_.crosstalk, m2, m1,
                                                            len, model)});
            }
        }
      }
      add(fmt::format("eq11_r{}", rid_[r1]), "eq11", std::move(terms), Sense::kLe, rhs);
    }
  }

  void overlap_definitions() {
    const double big_m = inst_.big_m();
    auto for_each_pair = [&](auto&& fn) {
      for (RequestIndex r1 = 0; r1 < R_; ++r1)
        for (RequestIndex r2 = 0; r2 < R_; ++r2) {
          if (r1 == r2) continue;
          for (LinkIndex e = 0; e < E_; ++e)
            for (int m1 = 0; m1 < M_; ++m1)
              for (int m2 = 0; m2 < M_; ++m2) {
                if (m1 != m2) fn(r1, r2, e, m1, m2);
              }
        }
    };
    auto suffix = [&](RequestIndex r1, RequestIndex r2, LinkIndex e, int m1, int m2) {
      return fmt::format("r{}_r{}_e{}_m{}_m{}", rid_[r1], rid_[r2], eid_[e], m1 + 1,
                         m2 + 1);
    };
    for_each_pair([&](RequestIndex r1, RequestIndex r2, LinkIndex e, int m1, int m2) {
      const VarId th = idx_->theta(r1, r2, e, m1, m2);
      std::vector<Term> lo, hi{{th, 1.0}};
      for (int t = 0; t < T_; ++t) {
        lo.push_back({idx_->beta(r1, r2, e, m1, m2, t), 1.0});
        hi.push_back({idx_->beta(r1, r2, e, m1, m2, t), -1.0});
      }
      lo.push_back({th, -big_m});
      const std::string s = suffix(r1, r2, e, m1, m2);
      add("eq12_lo_" + s, "eq12", std::move(lo), Sense::kLe, 0.0);
      add("eq12_hi_" + s, "eq12", std::move(hi), Sense::kLe, 0.0);
    });
    const char* families[] = {"eq13", "eq14", "eq15"};
    for (int which = 0; which < 3; ++which) {
      for_each_pair([&](RequestIndex r1, RequestIndex r2, LinkIndex e, int m1, int m2) {
        const std::string s = suffix(r1, r2, e, m1, m2);
        for (int t = 0; t < T_; ++t) {
          const VarId b = idx_->beta(r1, r2, e, m1, m2, t);
          const VarId l1 = idx_->lambda(r1, e, m1, t);
          const VarId l2 = idx_->lambda(r2, e, m2, t);
          const std::string name = fmt::format("{}_{}_t{}", families[which], s, t);
          if (which == 0) {
            add(name, "eq13", {{b, 1.0}, {l1, -1.0}, {l2, -1.0}}, Sense::kGe, -1.0);
          } else if (which == 1) {
            add(name, "eq14", {{b, 1.0}, {l1, -1.0}}, Sense::kLe, 0.0);
          } else {
            add(name, "eq15", {{b, 1.0}, {l2, -1.0}}, Sense::kLe, 0.0);
          }
        }
      });
    }
  }

  void objective() {
    std::vector<Term> throughput;
    for (RequestIndex r = 0; r < R_; ++r) {
      throughput.push_back({idx_->rho(r), inst_.requests[r].bandwidth_gbps});
    }
    std::vector<Term> usage;
    for (RequestIndex r = 0; r < R_; ++r)
      for (LinkIndex e = 0; e < E_; ++e)
        for (int m = 0; m < M_; ++m)
          for (int t = 0; t < T_; ++t) usage.push_back({idx_->lambda(r, e, m, t), 1.0});

    if (inst_.planner.objective.kind == ObjectiveKind::kWeighted) {
      const auto w = solve::objective_weights(inst_);
      std::vector<Term> terms;
      for (Term t : throughput) terms.push_back({t.var, w.eta1 * t.coef});
      for (Term t : usage) terms.push_back({t.var, -w.eta2});
      model_->objective = Objective{true, std::move(terms)};
      return;
    }
    model_->objective = Objective{true, throughput};
    model_->phase2_objective = Objective{false, std::move(usage)};
    model_->phase2_floor = Constraint{"phase2_throughput", "phase2",
                                      std::move(throughput), Sense::kGe,
                                      opts_.throughput_floor.value_or(0.0)};
  }

  const Instance& inst_;
  const BuildOptions& opts_;
  const Topology& topo_;
  std::size_t R_, E_, N_;
  int M_, T_;
  std::vector<std::vector<LinkIndex>> in_;
  std::vector<std::string> rid_, eid_, nid_;
  VariableIndex* idx_ = nullptr;
  MilpModel* model_ = nullptr;
};

}  // namespace

BuiltModel build_model(const Instance& instance, const BuildOptions& options) {
  const auto counts = count_formulas(instance);
  const auto vars = counts.total_variables();
  if (vars > static_cast<std::int64_t>(options.max_variables)) {
    throw Error(ErrorKind::kSizeLimit,
                fmt::format("model would have {} variables, limit is {}", vars,
                            options.max_variables));
  }
  return Builder(instance, options).build();
}

std::vector<double> assignment_from_schedule(const BuiltModel& built,
                                             const Instance& instance,
                                             const Schedule& schedule) {
  const VariableIndex& idx = built.index;
  const std::size_t R = instance.requests.size();
  const std::size_t E = instance.topology.link_count();
  const int M = instance.mode_count;
  const int T = instance.slot_count();
  std::vector<double> x(idx.total(), 0.0);

  for (const Assignment& a : schedule.accepted) {
    if (a.request >= R || a.slot_start < 0 || a.slot_end > T) {
      throw Error(ErrorKind::kValidation, "schedule does not fit the model");
    }
    for (LinkIndex e : a.path) {
      if (e >= E) throw Error(ErrorKind::kValidation, "schedule does not fit the model");
      for (ModeIndex m : a.modes) {
        if (m < 0 || m >= M) {
          throw Error(ErrorKind::kValidation, "schedule does not fit the model");
        }
        for (int t = a.slot_start; t < a.slot_end; ++t) x[idx.lambda(a.request, e, m, t)] = 1.0;
      }
    }
    x[idx.rho(a.request)] = 1.0;
  }

  auto lam = [&](RequestIndex r, LinkIndex e, int m, int t) {
    return x[idx.lambda(r, e, m, t)];
  };
  for (RequestIndex r = 0; r < R; ++r)
    for (LinkIndex e = 0; e < E; ++e) {
      for (int t = 0; t < T; ++t) {
        double any = 0.0;
        for (int m = 0; m < M; ++m) any = std::max(any, lam(r, e, m, t));
        x[idx.occ(r, e, t)] = any;
      }
      double link_used = 0.0;
      for (int t = 0; t < T; ++t) link_used = std::max(link_used, x[idx.occ(r, e, t)]);
      x[idx.use_link(r, e)] = link_used;
      for (int m = 0; m < M; ++m) {
        double used = 0.0;
        for (int t = 0; t < T; ++t) used = std::max(used, lam(r, e, m, t));
        x[idx.use_mode(r, e, m)] = used;
        for (int k = 0; k <= T; ++k) {
          const double cur = k < T ? lam(r, e, m, k) : 0.0;
          const double prev = k > 0 ? lam(r, e, m, k - 1) : 0.0;
          x[idx.c_mode(r, e, m, k)] = std::abs(cur - prev);
        }
      }
      for (int k = 0; k <= T; ++k) {
        const double cur = k < T ? x[idx.occ(r, e, k)] : 0.0;
        const double prev = k > 0 ? x[idx.occ(r, e, k - 1)] : 0.0;
        x[idx.c_any(r, e, k)] = std::abs(cur - prev);
      }
    }
  for (RequestIndex r1 = 0; r1 < R; ++r1)
    for (RequestIndex r2 = 0; r2 < R; ++r2) {
      if (r1 == r2) continue;
      for (LinkIndex e = 0; e < E; ++e)
        for (int m1 = 0; m1 < M; ++m1)
          for (int m2 = 0; m2 < M; ++m2) {
            if (m1 == m2) continue;
            double any = 0.0;
            for (int t = 0; t < T; ++t) {
              const double b = lam(r1, e, m1, t) * lam(r2, e, m2, t);
              x[idx.beta(r1, r2, e, m1, m2, t)] = b;
              any = std::max(any, b);
            }
            x[idx.theta(r1, r2, e, m1, m2)] = any;
          }
    }
  return x;
}

}  // namespace mmfplan::milp
