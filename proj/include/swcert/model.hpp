#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swcert/poly.hpp"
#include "swcert/predicate.hpp"

namespace swcert {

enum class SwitchKind { Arbitrary, StateDependent, Guarded, Timed, Controlled };

const char* switch_kind_text(SwitchKind k);
std::optional<SwitchKind> switch_kind_parse(const std::string& s);

struct Mode {
  std::string id;
  VectorField field;
  Predicate domain = Predicate::top();
  std::optional<Rational> max_dwell;  // Theta_p
};

struct Transition {
  std::string from;
  std::string to;
  Predicate guard = Predicate::top();
  std::map<std::string, Poly> reset;   // writes auxiliary variables only
  std::optional<Rational> min_dwell;   // theta_{p,q}
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string location;
  std::string message;
};

struct Diagnostics {
  std::vector<Diagnostic> items;

  bool ok() const;
  void error(const std::string& loc, const std::string& msg);
  void warning(const std::string& loc, const std::string& msg);
  std::string str() const;
};

struct SwitchedModel {
  std::string name;
  SwitchKind kind = SwitchKind::StateDependent;
  std::vector<std::string> state_vars;
  std::vector<std::string> aux_vars;
  std::map<std::string, Rational> constants;
  std::vector<Mode> modes;
  std::vector<Transition> transitions;

  // Optional annotations carried by the model file.
  std::map<std::string, Poly> lyapunov;   // mode id -> V_p
  std::map<std::string, Rational> rates;  // mode id -> lambda_p (timed)
  std::optional<Rational> sigma;          // timed attractivity decay constant
  std::optional<Predicate> region;        // restricted pre-attractivity region

  const Mode* find_mode(const std::string& id) const;
  std::vector<std::string> continuous_vars() const;  // state then aux
  /// Full variable universe used by polynomials of this model.
  std::vector<std::string> var_universe() const;
};

/// Kind-shape well-formedness per the switching-mechanism classes; reported
/// as diagnostics, never exceptions.
Diagnostics well_formed(const SwitchedModel& m);

/// Replaces `mode_id` by two modes with identical dynamics whose domains are
/// conjoined with split <= 0 and split >= 0. The union of the new domains
/// equals the old domain.
SwitchedModel ghost_split(const SwitchedModel& m, const std::string& mode_id, const Poly& split);

/// Deterministic Graphviz rendering: one node per mode, one edge per transition.
std::string emit_dot(const SwitchedModel& m);

/// Canonical textual form; parse(pretty_print(m)) is structurally equal to m.
std::string pretty_print(const SwitchedModel& m);

/// FNV-1a of the canonical form, as 16 hex digits.
std::string model_hash(const SwitchedModel& m);

}  // namespace swcert
