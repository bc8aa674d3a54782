#include "swcert/program_ir.hpp"

#include <sstream>

namespace swcert {

ProgramNode ProgramNode::seq(std::vector<ProgramNode> ns) {
  ProgramNode n;
  n.kind = Kind::Seq;
  n.children = std::move(ns);
  return n;
}

ProgramNode ProgramNode::choice(std::vector<ProgramNode> ns) {
  ProgramNode n;
  n.kind = Kind::Choice;
  n.children = std::move(ns);
  return n;
}

ProgramNode ProgramNode::test_of(Predicate p) {
  ProgramNode n;
  n.kind = Kind::Test;
  n.test = std::move(p);
  return n;
}

ProgramNode ProgramNode::assign_aux(std::string var, Poly value) {
  ProgramNode n;
  n.kind = Kind::AssignAux;
  n.var = std::move(var);
  n.value = std::move(value);
  return n;
}

ProgramNode ProgramNode::assign_mode(std::string mode) {
  ProgramNode n;
  n.kind = Kind::AssignMode;
  n.mode = std::move(mode);
  return n;
}

std::string ProgramNode::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Seq: {
      if (children.empty()) return "skip";
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) os << "; ";
        os << children[i].str();
      }
      break;
    }
    case Kind::Choice: {
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) os << " ++ ";
        os << "{" << children[i].str() << "}";
      }
      break;
    }
    case Kind::Test: os << "?" << test.str(); break;
    case Kind::AssignAux: os << var << " := " << value.str(); break;
    case Kind::AssignMode: os << "u := " << mode; break;
  }
  return os.str();
}

namespace {

Predicate mode_test(const std::string& id) {
  // u = id is a discrete test; represent it by tagging a Test node via the
  // mode field so the simulator can interpret it without encoding u as a
  // polynomial variable.
  (void)id;
  return Predicate::top();
}

}  // namespace

ControllerIR to_program(const SwitchedModel& m) {
  ControllerIR ir;
  const auto vars = m.var_universe();

  // Initialization: tau := 0 (timed); u := p nondeterministically.
  std::vector<ProgramNode> init_seq;
  if (m.kind == SwitchKind::Timed) init_seq.push_back(ProgramNode::assign_aux("tau", Poly(vars)));
  std::vector<ProgramNode> init_choice;
  for (const auto& md : m.modes) init_choice.push_back(ProgramNode::assign_mode(md.id));
  init_seq.push_back(ProgramNode::choice(std::move(init_choice)));
  ir.init = ProgramNode::seq(std::move(init_seq));

  // Controller: per current mode, choose an enabled transition or stay.
  std::vector<ProgramNode> per_mode;
  for (const auto& md : m.modes) {
    std::vector<ProgramNode> branches;
    for (const auto& t : m.transitions) {
      if (t.from != md.id) continue;
      std::vector<ProgramNode> seq;
      if (m.kind == SwitchKind::Timed) {
        Poly theta = Poly::constant(t.min_dwell.value_or(Rational(0)), vars);
        Poly tau = Poly::var("tau", vars);
        seq.push_back(ProgramNode::test_of(Predicate::atom(tau - theta, Cmp::Ge)));
        seq.push_back(ProgramNode::assign_aux("tau", Poly(vars)));
      } else if (!t.guard.is_true()) {
        seq.push_back(ProgramNode::test_of(t.guard));
      }
      for (const auto& [v, e] : t.reset) seq.push_back(ProgramNode::assign_aux(v, e));
      seq.push_back(ProgramNode::assign_mode(t.to));
      branches.push_back(ProgramNode::seq(std::move(seq)));
    }
    branches.push_back(ProgramNode::seq({}));  // stay: u := u
    ProgramNode guard_test = ProgramNode::test_of(mode_test(md.id));
    guard_test.mode = md.id;
    per_mode.push_back(ProgramNode::seq({guard_test, ProgramNode::choice(std::move(branches))}));
  }
  ir.controller = ProgramNode::choice(std::move(per_mode));

  for (const auto& md : m.modes) ir.plant.push_back(PlantBranch{md.id});
  return ir;
}

std::vector<ControllerPath> controller_paths(const SwitchedModel& m) {
  std::vector<ControllerPath> out;
  const auto vars = m.var_universe();
  for (const auto& md : m.modes) {
    for (const auto& t : m.transitions) {
      if (t.from != md.id) continue;
      ControllerPath p;
      p.from = md.id;
      p.to = t.to;
      if (m.kind == SwitchKind::Timed) {
        Poly theta = Poly::constant(t.min_dwell.value_or(Rational(0)), vars);
        p.tests = Predicate::atom(Poly::var("tau", vars) - theta, Cmp::Ge);
        p.resets["tau"] = Poly(vars);
      } else {
        p.tests = t.guard;
      }
      for (const auto& [v, e] : t.reset) p.resets[v] = e;
      out.push_back(std::move(p));
    }
    ControllerPath stay;
    stay.from = md.id;
    stay.to = md.id;
    stay.stay = true;
    out.push_back(std::move(stay));
  }
  return out;
}

}  // namespace swcert
