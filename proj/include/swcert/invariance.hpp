#pragma once

#include "swcert/checker.hpp"
#include "swcert/model.hpp"

namespace swcert {

/// Sufficient conditions for invariance of {p sense 0} along mode `mode_id`:
/// either a Darboux identity Lie(p) - g p nonnegative on the domain closure
/// for some polynomial cofactor g of bounded degree, or the strict barrier
/// condition Lie(p) > 0 on the domain closure intersected with p = 0.
/// Inconclusive otherwise (never a refutation: these are sufficient checks).
Verdict check_set_invariance(const SwitchedModel& m, const std::string& mode_id, const Poly& p,
                             Cmp sense, const CheckerConfig& cfg);

}  // namespace swcert
