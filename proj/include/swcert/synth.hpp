#pragma once

#include <optional>

#include "swcert/model.hpp"
#include "swcert/sdp.hpp"
#include "swcert/vc.hpp"

namespace swcert {

/// Numeric solver output. Untrusted by construction: certificates cannot be
/// built from it, only rationalized candidates that the checker re-verifies
/// exactly.
struct NumericSolution {
  std::vector<std::string> vars;
  std::vector<Monomial> monomials;
  Eigen::VectorXd coeffs;
  std::string status = "untrusted-numeric";
  double margin = 0.0;
};

struct TruncationReport {
  std::vector<std::pair<Monomial, Rational>> dropped;
  Rational threshold_abs;
};

struct SynthOptions {
  double eta = 1e-3;  // strictness slack so rationalization survives rounding
  BigInt denom_bound = BigInt(1000000);
  unsigned multiplier_degree = 2;
  SdpOptions sdp;
};

/// Continued-fraction rounding of every coefficient; deterministic. Throws on
/// non-finite input.
Poly rationalize(const NumericSolution& n, const BigInt& denom_bound);

/// Drops monomials whose |coefficient| is below rel_threshold * max
/// |coefficient|; exact comparisons. Throws if everything would be dropped.
Poly truncate_small_terms(const Poly& p, const Rational& rel_threshold, TruncationReport* report = nullptr);

/// Common quadratic candidate: simultaneous Lyapunov inequalities for linear
/// modes, sum-of-squares template search otherwise. The returned candidate is
/// untrusted until the checker certifies it.
std::optional<Poly> synth_common_quadratic(const SwitchedModel& m, const SynthOptions& opt = {});

/// Per-mode quadratic templates with coupling constraints: compatibility
/// equalities on domain overlaps (state-dependent) or descent inequalities on
/// guards (guarded). None on solver failure.
std::optional<LyapunovAssignment> synth_multiple(const SwitchedModel& m, const SynthOptions& opt = {});

}  // namespace swcert
