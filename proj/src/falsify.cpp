#include "swcert/falsify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace swcert {

namespace {

bool is_origin(const std::map<std::string, Rational>& pt) {
  return std::all_of(pt.begin(), pt.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

struct Box {
  std::vector<double> lo, hi;
};

// Per-variable bounds from single-variable linear atoms of the disjunct.
Box infer_box(const Conjunct& cj, const std::vector<std::string>& vars, double fallback) {
  Box b;
  b.lo.assign(vars.size(), -fallback);
  b.hi.assign(vars.size(), fallback);
  for (const auto& a : cj) {
    const Poly p = a.poly;
    // shape c1 * x + c0 (single variable, degree 1)
    if (p.degree() != 1) continue;
    int var_idx = -1;
    Rational c1(0), c0(0);
    bool simple = true;
    for (const auto& [m, c] : p.terms()) {
      if (m.is_constant()) {
        c0 = c;
        continue;
      }
      int nz = -1;
      for (std::size_t i = 0; i < m.exps.size(); ++i)
        if (m.exps[i] == 1) nz = static_cast<int>(i);
      if (nz < 0 || (var_idx >= 0 && nz != var_idx)) {
        simple = false;
        break;
      }
      var_idx = nz;
      c1 = c;
    }
    if (!simple || var_idx < 0 || c1.is_zero()) continue;
    auto global_idx = std::find(vars.begin(), vars.end(), p.vars()[var_idx]);
    if (global_idx == vars.end()) continue;
    std::size_t gi = static_cast<std::size_t>(global_idx - vars.begin());
    double bound = (-c0 / c1).to_double();
    bool upper = (a.cmp == Cmp::Le || a.cmp == Cmp::Lt) ? (c1.sign() > 0) : (c1.sign() < 0);
    if (a.cmp == Cmp::Eq) {
      b.lo[gi] = b.hi[gi] = bound;
    } else if (upper) {
      b.hi[gi] = std::min(b.hi[gi], bound);
    } else {
      b.lo[gi] = std::max(b.lo[gi], bound);
    }
  }
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (b.lo[i] > b.hi[i]) std::swap(b.lo[i], b.hi[i]);
  return b;
}

}  // namespace

bool conclusion_violated_at(const VerificationCondition& vc, const std::map<std::string, Rational>& point,
                            unsigned exp_budget, Rational* witnessed, std::string* detail) {
  // Directed interval for the conclusion sum.
  Rational lo(0), hi(0);
  for (const auto& t : vc.conclusion) {
    Rational v = evaluate(t.poly, point);
    if (v.is_zero()) continue;
    if (t.exponent.is_zero()) {
      lo += v;
      hi += v;
      continue;
    }
    ExpBound b = exp_enclosure(t.exponent, exp_budget);
    if (v.sign() > 0) {
      lo += v * b.lower;
      hi += v * b.upper;
    } else {
      lo += v * b.upper;
      hi += v * b.lower;
    }
  }
  bool violated = false;
  switch (vc.cmp) {
    case Cmp::Le: violated = lo > Rational(0); break;
    case Cmp::Lt: violated = lo >= Rational(0); break;
    case Cmp::Ge: violated = hi < Rational(0); break;
    case Cmp::Gt: violated = hi <= Rational(0); break;
    case Cmp::Eq: violated = lo > Rational(0) || hi < Rational(0); break;
  }
  if (violated) {
    if (witnessed) *witnessed = (vc.cmp == Cmp::Ge || vc.cmp == Cmp::Gt) ? hi : lo;
    if (detail) {
      *detail = std::string("conclusion ") + cmp_text(vc.cmp) + " 0 fails: certified bound " +
                ((vc.cmp == Cmp::Ge || vc.cmp == Cmp::Gt) ? hi.str() : lo.str());
    }
  }
  return violated;
}

std::optional<Counterexample> falsify(const VerificationCondition& vc, const FalsifyOptions& opt) {
  const std::vector<std::string>& vars = vc.vars;
  if (vars.empty()) {
    // Variable-free conclusion: one exact evaluation decides it.
    std::map<std::string, Rational> empty;
    Rational w;
    std::string detail;
    if (!vc.hypothesis.is_false() && conclusion_violated_at(vc, empty, opt.exp_budget, &w, &detail))
      return Counterexample{vc.id, {}, w, detail};
    return std::nullopt;
  }

  std::mt19937_64 rng(opt.seed);
  auto next_unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::uint64_t used = 0;
  double best_margin = -std::numeric_limits<double>::infinity();
  std::vector<double> best_point;

  // Double-precision conclusion margin (positive ~ violated) used only to
  // steer the search; all reported hits are exact.
  auto margin_of = [&](const std::vector<double>& pt) {
    double acc = 0;
    for (const auto& t : vc.conclusion) {
      double v = evaluate_double(t.poly.aligned_to(merge_vars(t.poly.vars(), vars)).aligned_to(vars), pt);
      acc += v * std::exp(t.exponent.to_double());
    }
    switch (vc.cmp) {
      case Cmp::Le:
      case Cmp::Lt: return acc;
      case Cmp::Ge:
      case Cmp::Gt: return -acc;
      case Cmp::Eq: return std::abs(acc);
    }
    return acc;
  };

  auto try_exact = [&](const std::map<std::string, Rational>& pt) -> std::optional<Counterexample> {
    if (vc.excluded_origin && is_origin(pt)) return std::nullopt;
    if (!vc.hypothesis.holds_at(pt)) return std::nullopt;
    Rational w;
    std::string detail;
    if (conclusion_violated_at(vc, pt, opt.exp_budget, &w, &detail))
      return Counterexample{vc.id, pt, w, detail};
    return std::nullopt;
  };

  auto as_point = [&](const std::vector<double>& coords) {
    std::map<std::string, Rational> pt;
    for (std::size_t i = 0; i < vars.size(); ++i) pt[vars[i]] = Rational::from_double(coords[i]);
    return pt;
  };

  auto consider = [&](const std::vector<double>& coords) -> std::optional<Counterexample> {
    ++used;
    double m = margin_of(coords);
    if (m > best_margin) {
      best_margin = m;
      best_point = coords;
    }
    return try_exact(as_point(coords));
  };

  // Stage 1: origin, unit points, axis probes.
  {
    std::vector<double> zero(vars.size(), 0.0);
    if (auto cx = consider(zero)) return cx;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      for (double s : {1.0, -1.0}) {
        std::vector<double> p(vars.size(), 0.0);
        p[i] = s;
        if (auto cx = consider(p)) return cx;
      }
    }
    std::vector<double> ones(vars.size(), 1.0);
    if (auto cx = consider(ones)) return cx;
  }

  // Stage 2: dyadic magnitude sweep per coordinate (catches violations with
  // coefficients as small as 2^-60), then coarse two-coordinate combinations.
  for (unsigned k = 0; k <= 60 && used < opt.budget; ++k) {
    double mag = std::ldexp(1.0, -static_cast<int>(k));
    for (std::size_t i = 0; i < vars.size(); ++i) {
      for (double s : {-1.0, 1.0}) {
        std::vector<double> p(vars.size(), 0.0);
        p[i] = s * mag;
        if (auto cx = consider(p)) return cx;
      }
    }
  }
  for (unsigned k = 0; k <= 20 && used < opt.budget && vars.size() >= 2; k += 2) {
    double mag = std::ldexp(1.0, -static_cast<int>(k));
    for (std::size_t i = 0; i < vars.size(); ++i) {
      for (std::size_t j = i + 1; j < vars.size(); ++j) {
        for (double si : {-1.0, 1.0}) {
          for (double sj : {-1.0, 1.0}) {
            std::vector<double> p(vars.size(), 0.0);
            p[i] = si * mag;
            p[j] = sj * mag;
            if (auto cx = consider(p)) return cx;
          }
        }
      }
    }
  }

  // Stage 3/4: uniform box sampling interleaved with log-scaled magnitudes,
  // per disjunct of the hypothesis.
  std::vector<Box> boxes;
  for (const auto& d : vc.hypothesis.disjuncts) boxes.push_back(infer_box(d, vars, opt.box));
  if (boxes.empty()) boxes.push_back(Box{std::vector<double>(vars.size(), -opt.box),
                                         std::vector<double>(vars.size(), opt.box)});
  std::size_t which = 0;
  while (used < opt.budget) {
    const Box& b = boxes[which % boxes.size()];
    ++which;
    std::vector<double> p(vars.size());
    if (which % 2 == 0) {
      for (std::size_t i = 0; i < vars.size(); ++i) p[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * next_unit();
    } else {
      for (std::size_t i = 0; i < vars.size(); ++i) {
        double u = next_unit() * 60.0;
        double mag = std::ldexp(1.0, -static_cast<int>(u));
        double span = std::max(std::abs(b.lo[i]), std::abs(b.hi[i]));
        double sign = (rng() & 1) ? 1.0 : -1.0;
        p[i] = sign * mag * span;
        if (p[i] < b.lo[i] || p[i] > b.hi[i]) p[i] = 0.0;
      }
    }
    if (auto cx = consider(p)) return cx;
  }

  // Stage 5: local descent on the best candidate's conclusion margin.
  if (!best_point.empty()) {
    std::vector<double> cur = best_point;
    double cur_m = best_margin;
    double step = 0.5;
    for (int it = 0; it < 400 && step > 1e-18; ++it) {
      bool improved = false;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        for (double s : {step, -step}) {
          std::vector<double> cand = cur;
          cand[i] += s;
          double m = margin_of(cand);
          if (m > cur_m) {
            cur_m = m;
            cur = cand;
            improved = true;
          }
        }
      }
      if (auto cx = try_exact(as_point(cur))) return cx;
      if (!improved) step *= 0.5;
    }
  }
  return std::nullopt;
}

}  // namespace swcert
