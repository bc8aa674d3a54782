#pragma once

#include <optional>
#include <vector>

#include "swcert/rational.hpp"

namespace swcert {

/// Exact symmetric LDL^T with diagonal pivoting, P A P^T = L D L^T with L unit
/// lower triangular. Suffices to decide positive (semi)definiteness of
/// rational symmetric matrices; when the answer is negative a rational witness
/// v with v^T A v <= 0 (< 0 for indefinite input) is produced.
struct LdltResult {
  bool pd = false;   // strictly positive definite
  bool psd = false;  // positive semidefinite
  std::vector<int> perm;
  RatMatrix L;
  RatVector D;
  int rank = 0;
  std::optional<RatVector> witness;  // v with v^T A v <= 0 when !pd
};

LdltResult ldlt_analyze(const RatMatrix& A);

/// Replays a stored factorization: checks P A P^T == L D L^T entry for entry
/// and the pivot signs. Independent of ldlt_analyze's elimination order.
bool ldlt_replay(const RatMatrix& A, const std::vector<int>& perm, const RatMatrix& L, const RatVector& D,
                 bool strict);

}  // namespace swcert
