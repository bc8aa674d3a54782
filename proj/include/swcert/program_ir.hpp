#pragma once

#include <memory>
#include <string>
#include <vector>

#include "swcert/model.hpp"

namespace swcert {

/// Discrete-program nodes mirroring the looping hybrid-program shape
/// init ; (controller ; plant)*. Tests, assignments to auxiliaries/timer and
/// the mode assignment u := q are the only effects.
struct ProgramNode {
  enum class Kind { Seq, Choice, Test, AssignAux, AssignMode };

  Kind kind = Kind::Seq;
  std::vector<ProgramNode> children;  // Seq / Choice
  Predicate test;                     // Test
  std::string var;                    // AssignAux
  Poly value;                         // AssignAux
  std::string mode;                   // AssignMode and Test context

  static ProgramNode seq(std::vector<ProgramNode> ns);
  static ProgramNode choice(std::vector<ProgramNode> ns);
  static ProgramNode test_of(Predicate p);
  static ProgramNode assign_aux(std::string var, Poly value);
  static ProgramNode assign_mode(std::string mode);

  std::string str() const;
};

struct PlantBranch {
  std::string mode;  // guarded by ?u = mode
};

/// Intermediate representation of the switching loop: initialization block,
/// one controller step, and the per-mode plant branches.
struct ControllerIR {
  ProgramNode init;
  ProgramNode controller;
  std::vector<PlantBranch> plant;
};

/// One root-to-leaf controller path: the conjunction of tests passed, the
/// resets executed, and the mode switched to. `stay` marks the identity
/// branch u := u.
struct ControllerPath {
  std::string from;
  std::string to;
  Predicate tests = Predicate::top();
  std::map<std::string, Poly> resets;
  bool stay = false;
};

ControllerIR to_program(const SwitchedModel& m);

/// Enumerates the root-to-leaf paths of the controller, in deterministic
/// order. Stay branches are included (marked), switching paths carry their
/// test conjunction and resets.
std::vector<ControllerPath> controller_paths(const SwitchedModel& m);

}  // namespace swcert
