#pragma once

#include <optional>

#include "swcert/certificate.hpp"
#include "swcert/predicate.hpp"
#include "swcert/sdp.hpp"

namespace swcert {

struct SosOptions {
  unsigned multiplier_degree = 2;  // degree of the S-procedure multipliers (cap 4)
  bool constraint_products = true; // admit pairwise products of constraints as generators
  BigInt denom_bound = BigInt(1) << 48;
  SdpOptions sdp;
  /// Strictness margins to try, largest first, as fractions of the target's
  /// coefficient scale.
  std::vector<Rational> eps_ladder{Rational::of(1, 10), Rational::of(1, 100), Rational::of(1, 10000),
                                   Rational::of(1, 1000000), Rational(BigInt(1), BigInt(100000000))};
};

/// Monomials over vars with total degree in [lo, hi], graded-lex ordered.
std::vector<Monomial> monomial_basis(std::size_t nvars, unsigned lo, unsigned hi);

/// Putinar-style certificate search for
///   target >= 0 (strict: > 0) on {g >= 0 for g in ineqs} ∩ {h = 0 for h in eqs},
/// strictness witnessed by target - eps * (sum x_i^2)^d with d = 1 when the
/// origin is excluded from the claim and d = 0 otherwise. The numeric Gram
/// comes from the projection solver; the returned certificate has been
/// rationalized and re-verified exactly (floats are never trusted).
std::optional<Certificate> find_sos_certificate(const Poly& target, const std::vector<Poly>& ineqs,
                                                const std::vector<Poly>& eqs, bool strict,
                                                bool excluded_origin,
                                                const std::vector<std::string>& vars,
                                                const SosOptions& opt);

/// Exact fast paths plus the SOS search; the single entry point used by the
/// checker for "prove target >= 0 (or > 0) on this constraint set".
std::optional<Certificate> prove_on_set(const Poly& target, const ConstraintSystem& sys, bool strict,
                                        bool excluded_origin, const std::vector<std::string>& vars,
                                        const SosOptions& opt);

}  // namespace swcert
