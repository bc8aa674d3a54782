#include "swcert/model.hpp"

#include <algorithm>
#include <sstream>

namespace swcert {

const char* switch_kind_text(SwitchKind k) {
  switch (k) {
    case SwitchKind::Arbitrary: return "arbitrary";
    case SwitchKind::StateDependent: return "state";
    case SwitchKind::Guarded: return "guarded";
    case SwitchKind::Timed: return "timed";
    case SwitchKind::Controlled: return "controlled";
  }
  return "?";
}

std::optional<SwitchKind> switch_kind_parse(const std::string& s) {
  if (s == "arbitrary") return SwitchKind::Arbitrary;
  if (s == "state") return SwitchKind::StateDependent;
  if (s == "guarded") return SwitchKind::Guarded;
  if (s == "timed") return SwitchKind::Timed;
  if (s == "controlled") return SwitchKind::Controlled;
  return std::nullopt;
}

bool Diagnostics::ok() const {
  return std::none_of(items.begin(), items.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void Diagnostics::error(const std::string& loc, const std::string& msg) {
  items.push_back({Severity::Error, loc, msg});
}

void Diagnostics::warning(const std::string& loc, const std::string& msg) {
  items.push_back({Severity::Warning, loc, msg});
}

std::string Diagnostics::str() const {
  std::ostringstream os;
  for (const auto& d : items)
    os << (d.severity == Severity::Error ? "error" : "warning") << " [" << d.location << "]: " << d.message
       << "\n";
  return os.str();
}

const Mode* SwitchedModel::find_mode(const std::string& id) const {
  for (const auto& m : modes)
    if (m.id == id) return &m;
  return nullptr;
}

std::vector<std::string> SwitchedModel::continuous_vars() const {
  std::vector<std::string> out = state_vars;
  out.insert(out.end(), aux_vars.begin(), aux_vars.end());
  return out;
}

std::vector<std::string> SwitchedModel::var_universe() const {
  std::vector<std::string> out = continuous_vars();
  if (kind == SwitchKind::Timed) out = merge_vars(out, {"tau"});
  return out;
}

Diagnostics well_formed(const SwitchedModel& m) {
  Diagnostics diag;
  if (m.modes.empty()) {
    diag.error(m.name, "at least one mode required");
    return diag;
  }
  // Unique ids, resolvable endpoints.
  for (std::size_t i = 0; i < m.modes.size(); ++i)
    for (std::size_t j = i + 1; j < m.modes.size(); ++j)
      if (m.modes[i].id == m.modes[j].id) diag.error(m.modes[j].id, "duplicate mode id");
  for (const auto& t : m.transitions) {
    if (!m.find_mode(t.from)) diag.error(t.from + "->" + t.to, "unknown transition source mode");
    if (!m.find_mode(t.to)) diag.error(t.from + "->" + t.to, "unknown transition target mode");
  }

  // Kind-specific shape.
  switch (m.kind) {
    case SwitchKind::Arbitrary:
      if (!m.transitions.empty()) diag.error(m.name, "arbitrary kind admits no transitions");
      for (const auto& md : m.modes)
        if (!md.domain.is_true()) diag.error(md.id, "arbitrary kind admits no domain constraints");
      break;
    case SwitchKind::StateDependent:
      if (!m.transitions.empty()) diag.error(m.name, "state kind admits no transitions (switching is implicit)");
      break;
    case SwitchKind::Guarded:
      for (const auto& t : m.transitions) {
        if (t.min_dwell) diag.error(t.from + "->" + t.to, "guarded kind admits no dwell annotations");
        if (!t.reset.empty()) diag.error(t.from + "->" + t.to, "guarded kind admits no resets");
      }
      for (const auto& md : m.modes)
        if (md.max_dwell) diag.error(md.id, "guarded kind admits no dwell annotations");
      break;
    case SwitchKind::Timed: {
      bool any_dwell = false;
      for (const auto& t : m.transitions)
        if (t.min_dwell) any_dwell = true;
      for (const auto& md : m.modes)
        if (md.max_dwell) any_dwell = true;
      if (!any_dwell) diag.error(m.name, "Timed kind requires dwell data");
      for (const auto& t : m.transitions) {
        if (!t.min_dwell) diag.error(t.from + "->" + t.to, "timed transition requires mindwell");
        if (t.min_dwell && *t.min_dwell < Rational(0))
          diag.error(t.from + "->" + t.to, "mindwell must be >= 0");
        if (!t.guard.is_true()) diag.error(t.from + "->" + t.to, "timed kind switches on dwell, not guards");
      }
      break;
    }
    case SwitchKind::Controlled:
      break;
  }
  for (const auto& md : m.modes)
    if (md.max_dwell && !(*md.max_dwell > Rational(0))) diag.error(md.id, "maxdwell must be > 0");

  // Resets must not write state variables (the alpha_ctrl restriction: the
  // controller programs may modify auxiliaries only).
  for (const auto& t : m.transitions) {
    for (const auto& [var, rhs] : t.reset) {
      if (std::find(m.state_vars.begin(), m.state_vars.end(), var) != m.state_vars.end())
        diag.error(t.from + "->" + t.to,
                   "reset writes state variable " + var + " (controllers may write auxiliaries only)");
      else if (std::find(m.aux_vars.begin(), m.aux_vars.end(), var) == m.aux_vars.end())
        diag.error(t.from + "->" + t.to, "reset writes undeclared variable " + var);
    }
  }

  // Every mode must define derivatives for all continuous variables it uses;
  // parse fills missing aux derivatives with 0, so check state coverage.
  for (const auto& md : m.modes) {
    for (const auto& v : m.state_vars)
      if (!md.field.defines(v)) diag.error(md.id, "mode does not define derivative of state variable " + v);
  }

  // The origin must satisfy at least one mode's domain closure, otherwise no
  // stability question can be posed at it.
  std::map<std::string, Rational> origin;
  for (const auto& v : m.continuous_vars()) origin[v] = Rational(0);
  if (m.kind == SwitchKind::Timed) origin["tau"] = Rational(0);
  bool origin_ok = false;
  for (const auto& md : m.modes)
    if (md.domain.closure().holds_at(origin)) origin_ok = true;
  if (!origin_ok) diag.error(m.name, "origin is outside every mode's domain closure");

  // Syntactic-closure caveat: equality atoms inside proper disjunctions can
  // make the closure over-approximate.
  for (const auto& md : m.modes) {
    if (md.domain.disjuncts.size() > 1) {
      for (const auto& d : md.domain.disjuncts)
        for (const auto& a : d)
          if (a.cmp == Cmp::Eq)
            diag.warning(md.id, "equality atom inside a disjunction: syntactic closure may over-approximate");
    }
  }
  return diag;
}

SwitchedModel ghost_split(const SwitchedModel& m, const std::string& mode_id, const Poly& split) {
  if (!m.find_mode(mode_id)) throw std::invalid_argument("ghost_split: unknown mode " + mode_id);
  SwitchedModel out = m;
  out.modes.clear();
  for (const auto& md : m.modes) {
    if (md.id != mode_id) {
      out.modes.push_back(md);
      continue;
    }
    Mode lo = md, hi = md;
    lo.id = md.id + "_1";
    hi.id = md.id + "_2";
    lo.domain = md.domain.and_with(Predicate::atom(split, Cmp::Le));
    hi.domain = md.domain.and_with(Predicate::atom(split, Cmp::Ge));
    out.modes.push_back(lo);
    out.modes.push_back(hi);
  }
  // Ghost modes keep the original Lyapunov annotation unless re-annotated.
  auto it = out.lyapunov.find(mode_id);
  if (it != out.lyapunov.end()) {
    out.lyapunov[mode_id + "_1"] = it->second;
    out.lyapunov[mode_id + "_2"] = it->second;
    out.lyapunov.erase(mode_id);
  }
  auto rit = out.rates.find(mode_id);
  if (rit != out.rates.end()) {
    out.rates[mode_id + "_1"] = rit->second;
    out.rates[mode_id + "_2"] = rit->second;
    out.rates.erase(mode_id);
  }
  return out;
}

namespace {

std::string ode_text(const SwitchedModel& m, const Mode& md) {
  std::ostringstream os;
  bool first = true;
  for (const auto& v : m.continuous_vars()) {
    auto it = md.field.rhs.find(v);
    if (it == md.field.rhs.end()) continue;
    if (!first) os << "; ";
    os << v << "' = " << it->second.str();
    first = false;
  }
  return os.str();
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string emit_dot(const SwitchedModel& m) {
  std::ostringstream os;
  os << "digraph \"" << dot_escape(m.name) << "\" {\n";
  os << "  rankdir=LR;\n";
  for (const auto& md : m.modes) {
    std::string label = md.id + "\\n" + dot_escape(ode_text(m, md));
    if (!md.domain.is_true()) label += "\\n& " + dot_escape(md.domain.str());
    if (md.max_dwell) label += "\\ntau <= " + md.max_dwell->str();
    os << "  \"" << dot_escape(md.id) << "\" [shape=box,label=\"" << label << "\"];\n";
  }
  for (const auto& t : m.transitions) {
    std::string label;
    if (!t.guard.is_true()) label += "?" + dot_escape(t.guard.str());
    for (const auto& [v, e] : t.reset) {
      if (!label.empty()) label += "; ";
      label += v + " := " + dot_escape(e.str());
    }
    if (t.min_dwell) {
      if (!label.empty()) label += "; ";
      label += "tau >= " + t.min_dwell->str();
    }
    os << "  \"" << dot_escape(t.from) << "\" -> \"" << dot_escape(t.to) << "\"";
    if (!label.empty()) os << " [label=\"" << label << "\"]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string pretty_print(const SwitchedModel& m) {
  std::ostringstream os;
  os << "system " << m.name << " {\n";
  for (const auto& [k, v] : m.constants) os << "  const " << k << " = " << v.str() << ";\n";
  if (!m.state_vars.empty()) {
    os << "  var ";
    for (std::size_t i = 0; i < m.state_vars.size(); ++i) os << (i ? ", " : "") << m.state_vars[i];
    os << ";\n";
  }
  if (!m.aux_vars.empty()) {
    os << "  aux ";
    for (std::size_t i = 0; i < m.aux_vars.size(); ++i) os << (i ? ", " : "") << m.aux_vars[i];
    os << ";\n";
  }
  os << "  kind " << switch_kind_text(m.kind) << ";\n";
  for (const auto& md : m.modes) {
    os << "  mode " << md.id << " {\n";
    os << "    ode { " << ode_text(m, md) << " }\n";
    if (!md.domain.is_true()) os << "    domain " << md.domain.str() << "\n";
    if (md.max_dwell) os << "    maxdwell " << md.max_dwell->str() << "\n";
    os << "  }\n";
  }
  for (const auto& t : m.transitions) {
    os << "  transition " << t.from << " -> " << t.to;
    if (!t.guard.is_true()) os << " when " << t.guard.str();
    bool first_reset = true;
    for (const auto& [v, e] : t.reset) {
      os << (first_reset ? " reset " : ", ") << v << " := " << e.str();
      first_reset = false;
    }
    if (t.min_dwell) os << " mindwell " << t.min_dwell->str();
    os << ";\n";
  }
  for (const auto& [mode, V] : m.lyapunov) os << "  lyapunov " << mode << " : " << V.str() << ";\n";
  for (const auto& [mode, r] : m.rates) os << "  rate " << mode << " : " << r.str() << ";\n";
  if (m.sigma) os << "  sigma " << m.sigma->str() << ";\n";
  if (m.region) os << "  region " << m.region->str() << ";\n";
  os << "}\n";
  return os.str();
}

std::string model_hash(const SwitchedModel& m) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : pretty_print(m)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  for (int i = 15; i >= 0; --i) os << ((h >> (4 * i)) & 0xf);
  return os.str();
}

}  // namespace swcert
