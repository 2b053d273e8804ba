#include <cmath>
#include <map>
#include <string>

#include <fmt/format.h>

#include "mmfplan/instance_io.hpp"
#include "mmfplan/milp.hpp"

namespace mmfplan::milp {

namespace {

constexpr std::size_t kLineWidth = 78;

const std::map<std::string, std::string>& family_notes() {
  static const std::map<std::string, std::string> notes = {
      {"eq2", "flow conservation in slot units"},
      {"eq3", "slot continuity at the endpoints"},
      {"eq4", "slot continuity at transit nodes"},
      {"eq5", "mode continuity at the endpoints"},
      {"eq6", "mode continuity at transit nodes"},
      {"eq7", "one request per link, mode and slot"},
      {"eq8", "contiguous slots per mode"},
      {"eq9", "same slot block on every mode used"},
      {"eq10", "enough slot units on every used link"},
      {"eq11", "accumulated crosstalk within threshold"},
      {"eq12", "overlap indicator from slot overlaps"},
      {"eq13", "slot overlap lower bound"},
      {"eq14", "slot overlap upper bound, first request"},
      {"eq15", "slot overlap upper bound, second request"},
      {"phase2", "throughput held at the phase 1 optimum"},
  };
  return notes;
}

std::string number(double x) {
  if (x == std::floor(x) && std::abs(x) < 1e15) {
    return fmt::format("{}", static_cast<long long>(x));
  }
  return fmt::format("{}", x);
}

// Appends tokens to `out`, wrapping before kLineWidth.
class LineWriter {
 public:
  explicit LineWriter(std::string& out) : out_(out) {}

  void start(const std::string& head) {
    out_ += head;
    col_ = head.size();
  }
  void token(const std::string& tok) {
    if (col_ + 1 + tok.size() > kLineWidth && col_ > 1) {
      out_ += "\n ";
      col_ = 1;
    }
    out_ += ' ';
    out_ += tok;
    col_ += 1 + tok.size();
  }
  void end() {
    out_ += '\n';
    col_ = 0;
  }

 private:
  std::string& out_;
  std::size_t col_ = 0;
};

void write_terms(LineWriter& w, const MilpModel& model,
                 const std::vector<Term>& terms) {
  if (terms.empty()) {
    // An empty row still needs a variable to be parseable.
    if (!model.variables().empty()) w.token("0 " + model.variables()[0].name);
    return;
  }
  bool first = true;
  for (const Term& t : terms) {
    const std::string& name = model.variables()[t.var].name;
    const double mag = std::abs(t.coef);
    std::string sign = t.coef < 0 ? "-" : (first ? "" : "+");
    std::string body = mag == 1.0 ? name : number(mag) + " " + name;
    w.token(sign.empty() ? body : sign + " " + body);
    first = false;
  }
}

void write_constraint(std::string& out, const MilpModel& model,
                      const Constraint& c) {
  const auto& notes = family_notes();
  auto it = notes.find(c.family);
  out += "\\ " + c.family;
  if (it != notes.end()) out += ": " + it->second;
  out += '\n';
  LineWriter w(out);
  w.start(" " + c.name + ":");
  write_terms(w, model, c.terms);
  const char* sense = c.sense == Sense::kLe ? "<=" : c.sense == Sense::kGe ? ">=" : "=";
  w.token(std::string(sense) + " " + number(c.rhs));
  w.end();
}

}  // namespace

std::string emit_lp(const MilpModel& model, int phase) {
  const bool second = model.two_phase() && phase == 2;
  const Objective& obj = second ? *model.phase2_objective : model.objective;

  std::string out;
  out += "\\ mode/slot planning model";
  if (model.two_phase()) out += fmt::format(", phase {} of 2", second ? 2 : 1);
  out += '\n';
  out += fmt::format("\\ {} variables, {} constraints\n", model.variables().size(),
                     model.constraints().size() + (second ? 1 : 0));
  out += obj.maximize ? "Maximize\n" : "Minimize\n";
  LineWriter w(out);
  w.start(" obj:");
  write_terms(w, model, obj.terms);
  w.end();

  out += "Subject To\n";
  for (const Constraint& c : model.constraints()) write_constraint(out, model, c);
  if (second && model.phase2_floor) write_constraint(out, model, *model.phase2_floor);

  out += "Bounds\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kContinuous) {
      out += fmt::format(" {} <= {} <= {}\n", number(v.lower), v.name, number(v.upper));
    }
  }

  out += "Binary\n";
  w.start("");
  bool any = false;
  for (const Variable& v : model.variables()) {
    if (v.kind != VarKind::kBinary) continue;
    w.token(v.name);
    any = true;
  }
  if (any) w.end();
  out += "End\n";
  return out;
}

std::vector<std::filesystem::path> emit_lp_files(const MilpModel& model,
                                                 const std::filesystem::path& path) {
  if (!model.two_phase()) {
    write_text_file(path, emit_lp(model, 1));
    return {path};
  }
  std::filesystem::path stem = path;
  if (stem.extension() == ".lp") stem.replace_extension();
  std::vector<std::filesystem::path> out;
  for (int phase : {1, 2}) {
    std::filesystem::path p = stem;
    p += fmt::format(".phase{}.lp", phase);
    write_text_file(p, emit_lp(model, phase));
    out.push_back(p);
  }
  return out;
}

}  // namespace mmfplan::milp
