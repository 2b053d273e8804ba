// The full mixed-integer program for crosstalk-aware route / mode / slot
// assignment, built as an abstract model and written out in LP format.
//
// Variable families (all binary):
//   lambda[r][e][m][t]       request r occupies mode m, slot t on link e
//   rho[r]                   request r accepted
//   beta[r1][r2][e][m1][m2][t]  r1 on m1 and r2 on m2 share slot t on e
//   theta[r1][r2][e][m1][m2]    ... in at least one slot
//   c_mode[r][e][m][k]       occupancy transition at slot boundary k
//   occ[r][e][t]             r uses slot t on e on any mode
//   c_any[r][e][k]           transition of occ at boundary k
//   use_mode[r][e][m]        r uses mode m on e in any slot
//   use_link[r][e]           r uses link e
// Boundaries k run over 0..|T|, comparing slot k-1 with slot k and treating
// slots -1 and |T| as empty, so "at most two transitions" means a single
// contiguous block.

#ifndef MMFPLAN_MILP_HPP_
#define MMFPLAN_MILP_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmfplan/model.hpp"
#include "mmfplan/schedule.hpp"

namespace mmfplan::milp {

using VarId = std::size_t;

enum class VarKind { kBinary, kContinuous };
enum class Sense { kLe, kGe, kEq };

struct Variable {
  std::string name;
  std::string family;
  VarKind kind = VarKind::kBinary;
  double lower = 0.0;
  double upper = 1.0;
};

struct Term {
  VarId var;
  double coef;
};

struct Constraint {
  std::string name;
  std::string family;
  std::vector<Term> terms;
  Sense sense = Sense::kLe;
  double rhs = 0.0;
};

struct Objective {
  bool maximize = true;
  std::vector<Term> terms;
};

class MilpModel {
 public:
  VarId add_variable(std::string name, std::string family,
                     VarKind kind = VarKind::kBinary);
  void add_constraint(Constraint c);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  // Single objective (weighted) or phase 1 of the lexicographic pair.
  Objective objective;
  // Lexicographic only: the resource-usage objective and the constraint
  // holding throughput at the phase-1 optimum.
  std::optional<Objective> phase2_objective;
  std::optional<Constraint> phase2_floor;

  bool two_phase() const { return phase2_objective.has_value(); }

  // Names of constraints violated by `values` (indexed by VarId), in model
  // order. Integrality and bounds are checked too.
  std::vector<std::string> violated(const std::vector<double>& values,
                                    bool include_phase2 = false) const;

  // Throws kValidation on duplicate names or dangling variable references.
  void check_well_formed() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
};

// Offsets into the variable table for each family.
class VariableIndex {
 public:
  VariableIndex() = default;
  VariableIndex(std::size_t requests, std::size_t links, int modes, int slots);

  VarId lambda(RequestIndex r, LinkIndex e, ModeIndex m, int t) const;
  VarId rho(RequestIndex r) const;
  VarId beta(RequestIndex r1, RequestIndex r2, LinkIndex e, ModeIndex m1,
             ModeIndex m2, int t) const;
  VarId theta(RequestIndex r1, RequestIndex r2, LinkIndex e, ModeIndex m1,
              ModeIndex m2) const;
  VarId c_mode(RequestIndex r, LinkIndex e, ModeIndex m, int k) const;
  VarId occ(RequestIndex r, LinkIndex e, int t) const;
  VarId c_any(RequestIndex r, LinkIndex e, int k) const;
  VarId use_mode(RequestIndex r, LinkIndex e, ModeIndex m) const;
  VarId use_link(RequestIndex r, LinkIndex e) const;

  std::size_t total() const { return total_; }

 private:
  std::size_t pair(RequestIndex r1, RequestIndex r2) const;
  std::size_t mode_pair(ModeIndex m1, ModeIndex m2) const;

  std::size_t R_ = 0, E_ = 0, M_ = 0, T_ = 0;
  std::size_t lambda_ = 0, rho_ = 0, beta_ = 0, theta_ = 0, c_mode_ = 0,
              occ_ = 0, c_any_ = 0, use_mode_ = 0, use_link_ = 0, total_ = 0;
};

struct BuildOptions {
  // Phase-2 right-hand side: the phase-1 optimal throughput. Without it the
  // floor is 0 and the LP comment says so.
  std::optional<double> throughput_floor;
  std::size_t max_variables = 5'000'000;
};

struct BuiltModel {
  MilpModel model;
  VariableIndex index;
};

// Throws kSizeLimit when the variable count exceeds options.max_variables.
BuiltModel build_model(const Instance& instance, const BuildOptions& options = {});

struct FormulaCounts {
  std::map<std::string, std::int64_t> variables;    // per family
  std::map<std::string, std::int64_t> constraints;  // per row family
  std::int64_t total_variables() const;
  std::int64_t total_constraints() const;

  bool operator==(const FormulaCounts&) const = default;
};

// Closed-form model size.
FormulaCounts count_formulas(const Instance& instance);
// Size of a built model, tallied by family.
FormulaCounts tally(const MilpModel& model);

// Variable values representing `schedule`. Throws kValidation if the
// schedule references slots, modes or links outside the instance.
std::vector<double> assignment_from_schedule(const BuiltModel& built,
                                             const Instance& instance,
                                             const Schedule& schedule);

// LP-format text. `phase` is 1 or 2 for two-phase models (ignored otherwise).
std::string emit_lp(const MilpModel& model, int phase = 1);

// Writes `path` for single-objective models; for two-phase models writes
// `<stem>.phase1.lp` and `<stem>.phase2.lp` next to it. Returns the paths.
std::vector<std::filesystem::path> emit_lp_files(const MilpModel& model,
                                                 const std::filesystem::path& path);

}  // namespace mmfplan::milp

#endif  // MMFPLAN_MILP_HPP_
