#pragma once

#include <cstdint>
#include <optional>

#include "swcert/certificate.hpp"
#include "swcert/vc.hpp"

namespace swcert {

struct FalsifyOptions {
  std::uint64_t budget = 20000;
  std::uint64_t seed = 12345;
  unsigned exp_budget = 30;
  double box = 10.0;  // sampling half-width for unbounded coordinates
};

/// Deterministic counterexample search: unit/dyadic probes (down to 2^-60 per
/// coordinate), uniform box sampling, log-scaled magnitude sampling and a
/// local descent on the conclusion margin. Every hit is re-checked in exact
/// rational arithmetic before it is reported; absence of a counterexample is
/// not a proof.
std::optional<Counterexample> falsify(const VerificationCondition& vc, const FalsifyOptions& opt);

/// Exact violation test of a candidate point against the VC conclusion
/// (hypothesis not included). Exponential coefficients are handled by
/// directed enclosures, so a `true` answer is sound.
bool conclusion_violated_at(const VerificationCondition& vc, const std::map<std::string, Rational>& point,
                            unsigned exp_budget, Rational* witnessed = nullptr, std::string* detail = nullptr);

}  // namespace swcert
