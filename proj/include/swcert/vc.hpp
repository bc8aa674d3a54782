#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swcert/exp_bound.hpp"
#include "swcert/model.hpp"
#include "swcert/predicate.hpp"

namespace swcert {

/// poly * e^exponent summand of a VC conclusion.
struct ExpTerm {
  Poly poly;
  Rational exponent;
};

struct VcOrigin {
  std::string rule;
  std::string premise;
  std::vector<std::string> modes;
};

/// Universally quantified semialgebraic implication
///   forall vars: hypothesis -> (sum of exp terms) cmp 0,
/// possibly with the origin excluded ("|x| > 0 ->"). The excluded-origin flag
/// additionally obliges the conclusion polynomial to vanish at the origin
/// whenever the hypothesis admits it.
struct VerificationCondition {
  enum class Marker { None, Radial, SetInvariance };

  std::string id;
  VcOrigin origin;
  std::vector<std::string> vars;
  Predicate hypothesis = Predicate::top();
  std::vector<ExpTerm> conclusion;
  Cmp cmp = Cmp::Ge;
  bool excluded_origin = false;
  Marker marker = Marker::None;

  // Set-invariance payload (marker == SetInvariance): invariance of
  // inv_poly inv_sense 0 along inv_mode's flow.
  std::string inv_mode;
  Poly inv_poly;
  Cmp inv_sense = Cmp::Ge;

  bool has_exp() const;
  /// Exponent-0 part plus nothing else; only valid when !has_exp().
  Poly plain_conclusion() const;
  /// Sum of the exponent-0 terms (always valid).
  Poly plain_conclusion_part() const;
  bool strict() const { return cmp_is_strict(cmp); }
};

struct LyapunovAssignment {
  std::map<std::string, Poly> V;          // mode id -> V_p
  std::map<std::string, Rational> rates;  // mode id -> lambda_p
  std::optional<Rational> sigma;

  static LyapunovAssignment from_model(const SwitchedModel& m);
  static LyapunovAssignment common(const SwitchedModel& m, const Poly& V);
  bool covers(const SwitchedModel& m) const;
  bool is_common() const;
};

class VcGenError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Common-Lyapunov-function premises for arbitrary/state-dependent switching:
/// positivity, a radial-unboundedness marker, and per-mode strict Lie
/// negativity on the domain closure.
std::vector<VerificationCondition> gen_clf(const SwitchedModel& m, const Poly& V);

/// Multiple-Lyapunov-function premises for state-dependent switching:
/// per-mode positivity/radial/Lie plus, per unordered mode pair, the
/// domain-overlap compatibility equality V_p = V_q emitted as two <=
/// conclusions.
std::vector<VerificationCondition> gen_mlf_state(const SwitchedModel& m, const LyapunovAssignment& A);

/// Guarded switching: per-mode premises plus one descent condition
/// G_{p,q} -> V_q <= V_p per transition.
std::vector<VerificationCondition> gen_mlf_guarded(const SwitchedModel& m, const LyapunovAssignment& A);

/// Time-dependent switching: positivity/radial per mode, exponential rate
/// conditions Lie V_p <= -lambda_p V_p, and per-transition dwell conditions
/// in eliminated form V_q <= V_p e^{E(p,q)}. The stability-family exponent is
/// always emitted; the attractivity family is emitted with its sigma-shifted
/// exponent when the model (or assignment) fixes sigma explicitly, and at the
/// sigma -> 0 boundary otherwise.
std::vector<VerificationCondition> gen_mlf_timed(const SwitchedModel& m, const LyapunovAssignment& A);

/// Controlled switching: per-mode plant premises plus one descent condition
/// per controller path, with the path resets substituted into the target
/// Lyapunov function.
std::vector<VerificationCondition> gen_controlled_unfold(const SwitchedModel& m, const LyapunovAssignment& A);

/// Region-restricted pre-attractivity: region-invariance obligations per
/// mode plus Lie negativity restricted to the region. Stability keeps a
/// non-strict global Lie premise. With region == true this degenerates to
/// gen_clf.
std::vector<VerificationCondition> gen_restricted_attractivity(const SwitchedModel& m, const Poly& V,
                                                               const Predicate& region);

/// Stability-family dwell exponent E(p,q) of the eliminated form.
Rational dwell_exponent_stability(const Rational& lambda_p, const Rational& theta_pq,
                                  const std::optional<Rational>& Theta_p, const Rational& lambda_q,
                                  const std::optional<Rational>& Theta_q);

}  // namespace swcert
