#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"  // vendored nlohmann/json

#include "swcert/exp_bound.hpp"
#include "swcert/ldlt.hpp"
#include "swcert/poly.hpp"

namespace swcert {

/// One PSD block of a sum-of-squares decomposition: generator * z^T Q z where
/// `generator` is a product of hypothesis constraints (1 for the main block)
/// and z is the stored monomial basis.
struct SosBlock {
  Poly generator;
  std::vector<Monomial> basis;
  RatMatrix gram;
};

struct EqMultiplier {
  Poly constraint;  // h = 0 hypothesis
  Poly multiplier;  // free polynomial
};

/// Rational sum-of-squares certificate for
///   target - sum_S gen_S (z_S^T Q_S z_S) - sum_j mu_j h_j - eps (sum x_i^2)^d = 0
/// with every Q_S positive semidefinite. All data exact; replaying the
/// identity coefficient-for-coefficient is the proof.
struct SosCertificate {
  std::vector<std::string> vars;
  Poly target;
  std::vector<SosBlock> blocks;
  std::vector<EqMultiplier> eqs;
  Rational eps;
  unsigned eps_power = 1;
};

/// Exact LDL^T of the Gram matrix of a quadratic form.
struct PdCertificate {
  std::vector<std::string> vars;
  RatMatrix gram;
  std::vector<int> perm;
  RatMatrix L;
  RatVector D;
  bool strict = true;
};

struct Certificate;

/// Directed exponential-enclosure step: e^{exponent} was replaced by `bound`
/// on the stated side, reducing to the inner rational certificate.
struct ExpComparisonCertificate {
  Rational exponent;
  unsigned budget = 0;
  Rational bound_lower;
  Rational bound_upper;
  std::string direction;  // "lower" | "upper" | "exact-zero"
  std::vector<Certificate> inner;
};

struct Certificate {
  enum class Kind { PdFactorization, Sos, ExpComparison, Vacuous };

  Kind kind = Kind::Vacuous;
  std::optional<PdCertificate> pd;
  std::optional<SosCertificate> sos;
  std::shared_ptr<ExpComparisonCertificate> exp;
  std::string note;  // e.g. vacuity reason
};

struct Counterexample {
  std::string vc_id;
  std::map<std::string, Rational> point;
  Rational witnessed_value;
  std::string detail;
};

enum class VerdictStatus { Proved, Refuted, Inconclusive };

struct Verdict {
  VerdictStatus status = VerdictStatus::Inconclusive;
  /// One certificate per hypothesis disjunct (single entry when the split is
  /// immaterial, e.g. the quadratic fast path).
  std::vector<Certificate> certificates;
  std::optional<Counterexample> counterexample;
  std::string reason;

  static Verdict proved(std::vector<Certificate> cs);
  static Verdict refuted(Counterexample cx);
  static Verdict inconclusive(std::string why);
  bool is_proved() const { return status == VerdictStatus::Proved; }
  bool is_refuted() const { return status == VerdictStatus::Refuted; }
};

nlohmann::ordered_json poly_to_json(const Poly& p);
Poly poly_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json counterexample_to_json(const Counterexample& c);
Counterexample counterexample_from_json(const nlohmann::ordered_json& j);

/// Exact replay of a certificate, sharing no code with the search path:
/// rebuilds the certified identity in rational arithmetic and re-checks PSD
/// by exact elimination. Returns the certified target polynomial (the
/// caller compares it against the VC) or nullopt if the replay fails.
std::optional<Poly> replay_certificate(const Certificate& c, std::string* error = nullptr);

/// Exact re-evaluation of a counterexample against a target polynomial
/// claimed to satisfy `cmp 0` under the hypothesis constraints; returns true
/// when the violation is reproduced.
bool counterexample_violates(const std::map<std::string, Rational>& point, const Poly& target, bool strict);

}  // namespace swcert
