#pragma once

#include "swcert/falsify.hpp"
#include "swcert/sos.hpp"
#include "swcert/vc.hpp"

namespace swcert {

struct CheckerConfig {
  SosOptions sos;
  FalsifyOptions falsify;
  unsigned exp_budget = 30;
  unsigned exp_budget_cap = 120;
};

/// Positive (semi)definiteness of a symmetric rational matrix with an exact
/// LDL^T certificate, or a rational witness vector on refutation.
Verdict check_pd_quadratic(const RatMatrix& Q, bool strict, const std::vector<std::string>& vars);

/// Full dispatcher: vacuity, origin equalities, exponential path, quadratic
/// fast path, sum-of-squares search, then falsification. First conclusive
/// answer wins. Set-invariance marker VCs need the model and must go through
/// check_set_invariance instead.
Verdict check_vc(const VerificationCondition& vc, const CheckerConfig& cfg);

/// Dwell-shape conditions with exponential constants: replaces e^E by the
/// directed enclosure bound and dispatches the resulting rational condition,
/// widening the enclosure budget up to the cap before giving up.
Verdict check_exp_vc(const VerificationCondition& vc, const CheckerConfig& cfg);

}  // namespace swcert
