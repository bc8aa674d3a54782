#include "swcert/sos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

namespace swcert {

std::vector<Monomial> monomial_basis(std::size_t nvars, unsigned lo, unsigned hi) {
  std::vector<Monomial> out;
  Monomial cur{std::vector<unsigned>(nvars, 0)};
  std::vector<Monomial> all;
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t idx, unsigned left) {
    if (idx == nvars) {
      all.push_back(cur);
      return;
    }
    for (unsigned e = 0; e <= left; ++e) {
      cur.exps[idx] = e;
      rec(idx + 1, left - e);
    }
    cur.exps[idx] = 0;
  };
  rec(0, hi);
  for (auto& m : all)
    if (m.degree() >= lo) out.push_back(m);
  std::sort(out.begin(), out.end(), GradedLex{});
  return out;
}

namespace {

struct Generator {
  Poly original;  // exact product of the hypothesis constraints (1 for main)
  Poly scaled;    // same, divided by its coefficient scale
  Rational scale; // original == scale * scaled
};

Monomial mono_add(const Monomial& a, const Monomial& b) {
  Monomial m = a;
  for (std::size_t i = 0; i < m.exps.size(); ++i) m.exps[i] += b.exps[i];
  return m;
}

Poly sum_of_squares_vars(const std::vector<std::string>& vars) {
  Poly sq(vars);
  for (const auto& v : vars) {
    Poly x = Poly::var(v, vars);
    sq = sq + x * x;
  }
  return sq;
}

Rational rat_of(double x, const BigInt& bound) { return rationalize_double(x, bound); }

// Exact PSD rationalization through the numeric Cholesky factor; always
// returns an exactly PSD rational matrix close to Q.
std::optional<RatMatrix> rationalize_psd(const Eigen::MatrixXd& Q, const BigInt& bound) {
  const auto n = Q.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Q + Q.transpose()));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd L = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
  RatMatrix Lr(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) Lr(i, j) = rat_of(L(i, j), bound);
  RatMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      Rational s(0);
      for (Eigen::Index k = 0; k < n; ++k) s += Lr(i, k) * Lr(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

Poly gram_poly_over(const std::vector<std::string>& vars, const std::vector<Monomial>& basis,
                    const RatMatrix& Q) {
  Poly acc(vars);
  const int n = static_cast<int>(basis.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (Q(i, j).is_zero()) continue;
      acc.add_term(mono_add(basis[i], basis[j]), Q(i, j));
    }
  return acc;
}

}  // namespace

std::optional<Certificate> find_sos_certificate(const Poly& target_in, const std::vector<Poly>& ineqs_in,
                                                const std::vector<Poly>& eqs_in, bool strict,
                                                bool excluded_origin,
                                                const std::vector<std::string>& vars,
                                                const SosOptions& opt) {
  Poly target = target_in.aligned_to(vars);
  if (target.is_zero()) return std::nullopt;
  const Rational sT = target.max_abs_coeff();
  const Poly targetScaled = target.scaled(Rational(1) / sT);

  std::vector<Poly> ineqs, eqs;
  std::vector<Rational> ineq_scale, eq_scale;
  for (const auto& g : ineqs_in) {
    Poly a = g.aligned_to(vars);
    if (a.is_zero()) continue;
    Rational s = a.max_abs_coeff();
    ineqs.push_back(a.scaled(Rational(1) / s));
    ineq_scale.push_back(s);
  }
  for (const auto& h : eqs_in) {
    Poly a = h.aligned_to(vars);
    if (a.is_zero()) continue;
    Rational s = a.max_abs_coeff();
    eqs.push_back(a.scaled(Rational(1) / s));
    eq_scale.push_back(s);
  }

  const unsigned mult_deg = std::max(2u, opt.multiplier_degree) & ~1u;
  const unsigned bd = mult_deg / 2;  // multiplier basis degree

  std::vector<Generator> gens;
  {
    Generator main;
    main.original = Poly::constant(Rational(1), vars);
    main.scaled = main.original;
    main.scale = Rational(1);
    gens.push_back(main);
    for (std::size_t i = 0; i < ineqs.size(); ++i)
      gens.push_back(Generator{ineqs[i].scaled(ineq_scale[i]), ineqs[i], ineq_scale[i]});
    if (opt.constraint_products) {
      for (std::size_t i = 0; i < ineqs.size(); ++i)
        for (std::size_t j = i; j < ineqs.size(); ++j) {
          Generator g;
          g.scaled = ineqs[i] * ineqs[j];
          g.scale = ineq_scale[i] * ineq_scale[j];
          g.original = g.scaled.scaled(g.scale);
          gens.push_back(g);
        }
    }
  }

  // Keep the identity degree at the target's degree: inflating it to admit
  // higher-degree multipliers forces boundary-only Grams (rows of degree
  // beyond the target pin their diagonals to zero), which alternating
  // projections handle poorly. Multiplier degrees fit inside the budget.
  const unsigned eps_power = excluded_origin ? 1u : 0u;
  unsigned D = targetScaled.degree();
  for (std::size_t s = 1; s < gens.size(); ++s) D = std::max(D, gens[s].scaled.degree());
  if (strict) D = std::max(D, 2 * eps_power);
  if (D % 2) ++D;
  const unsigned half = D / 2;

  std::vector<std::vector<Monomial>> full_bases(gens.size());
  full_bases[0] = monomial_basis(vars.size(), 0, half);
  for (std::size_t s = 1; s < gens.size(); ++s) {
    unsigned room = (D - gens[s].scaled.degree()) / 2;
    full_bases[s] = monomial_basis(vars.size(), 0, std::min(bd, room));
  }
  std::vector<std::vector<Monomial>> eq_basis;
  for (const auto& h : eqs) {
    unsigned room = D >= h.degree() ? D - h.degree() : 0;
    eq_basis.push_back(monomial_basis(vars.size(), 0, room));
  }

  std::vector<Monomial> universe = monomial_basis(vars.size(), 0, D);
  std::map<Monomial, int, GradedLex> row_of;
  for (std::size_t i = 0; i < universe.size(); ++i) row_of[universe[i]] = static_cast<int>(i);

  const Poly W = eps_power == 0 ? Poly::constant(Rational(1), vars) : sum_of_squares_vars(vars);

  // Assembles the coefficient-identity SDP for the given per-block bases.
  auto assemble = [&](const std::vector<std::vector<Monomial>>& bases, const Poly& rhsPoly,
                      SdpProblem& prob) -> bool {
    prob = SdpProblem{};
    for (const auto& b : bases) prob.block_sizes.push_back(static_cast<int>(b.size()));
    int n_free = 0;
    std::vector<int> eq_offset;
    for (const auto& b : eq_basis) {
      eq_offset.push_back(n_free);
      n_free += static_cast<int>(b.size());
    }
    prob.n_free = n_free;
    prob.rows.assign(universe.size(), {});
    prob.rhs.assign(universe.size(), 0.0);
    int free_base = 0;
    for (std::size_t b = 0; b < prob.block_sizes.size(); ++b)
      free_base += prob.tri_size(static_cast<int>(b));

    for (std::size_t s = 0; s < gens.size(); ++s) {
      const auto& basis = bases[s];
      for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
        for (int j = i; j < static_cast<int>(basis.size()); ++j) {
          Monomial zz = mono_add(basis[i], basis[j]);
          double mult = (i == j) ? 1.0 : 2.0;
          int vidx = prob.entry_index(static_cast<int>(s), i, j);
          for (const auto& [gm, gc] : gens[s].scaled.terms()) {
            auto it = row_of.find(mono_add(zz, gm));
            if (it == row_of.end()) return false;
            prob.rows[it->second].push_back({vidx, mult * gc.to_double()});
          }
        }
      }
    }
    for (std::size_t e = 0; e < eqs.size(); ++e) {
      for (int k = 0; k < static_cast<int>(eq_basis[e].size()); ++k) {
        int vidx = free_base + eq_offset[e] + k;
        for (const auto& [hm, hc] : eqs[e].terms()) {
          auto it = row_of.find(mono_add(eq_basis[e][k], hm));
          if (it == row_of.end()) continue;
          prob.rows[it->second].push_back({vidx, hc.to_double()});
        }
      }
    }
    for (const auto& [m, c] : rhsPoly.terms()) {
      auto it = row_of.find(m);
      if (it == row_of.end()) return false;
      prob.rhs[it->second] = c.to_double();
    }
    return true;
  };

  // Exact reconstruction: rationalize the numeric solution, absorb the defect
  // into the main Gram, and verify everything in rational arithmetic.
  auto reconstruct = [&](const SdpSolution& sol, const std::vector<std::vector<Monomial>>& bases,
                         const Rational& eps, const Poly& rhsPoly,
                         const BigInt& denom_bound) -> std::optional<Certificate> {
    // Rationalized PSD blocks get a small exact diagonal cushion. Entries
    // pinned by their identity row are pushed back by the defect pass, so the
    // cushion survives exactly on the unpinned directions where rounding
    // would otherwise break positive semidefiniteness.
    const Rational cushion(BigInt(1), BigInt(1) << 36);
    std::vector<std::optional<RatMatrix>> grams(gens.size());
    for (std::size_t s = 1; s < gens.size(); ++s) {
      if (bases[s].empty() || sol.blocks[s].size() == 0 ||
          sol.blocks[s].lpNorm<Eigen::Infinity>() < 1e-9) {
        grams[s] = std::nullopt;
        continue;
      }
      grams[s] = rationalize_psd(sol.blocks[s], denom_bound);
      if (!grams[s]) return std::nullopt;
      for (Eigen::Index i = 0; i < grams[s]->rows(); ++i) (*grams[s])(i, i) += cushion;
    }
    std::vector<Poly> eq_mults;
    {
      int off = 0;
      for (std::size_t e = 0; e < eqs.size(); ++e) {
        Poly mu(vars);
        for (int k = 0; k < static_cast<int>(eq_basis[e].size()); ++k) {
          Rational rv = rat_of(sol.free_vars(off + k), denom_bound);
          if (!rv.is_zero()) mu.add_term(eq_basis[e][k], rv);
        }
        off += static_cast<int>(eq_basis[e].size());
        eq_mults.push_back(mu);
      }
    }

    Poly residual = rhsPoly;
    for (std::size_t s = 1; s < gens.size(); ++s) {
      if (!grams[s]) continue;
      residual = residual - gens[s].scaled * gram_poly_over(vars, bases[s], *grams[s]);
    }
    for (std::size_t e = 0; e < eqs.size(); ++e) residual = residual - eq_mults[e] * eqs[e];

    const auto& mb = bases[0];
    std::map<Monomial, int, GradedLex> mb_index;
    for (std::size_t i = 0; i < mb.size(); ++i) mb_index[mb[i]] = static_cast<int>(i);
    RatMatrix Qm(mb.size(), mb.size());
    for (std::size_t i = 0; i < mb.size(); ++i)
      for (std::size_t j = i; j < mb.size(); ++j) {
        double avg = 0.5 * (sol.blocks[0](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                            sol.blocks[0](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
        Rational rv = rat_of(avg, denom_bound);
        Qm(i, j) = rv;
        Qm(j, i) = rv;
      }
    for (std::size_t i = 0; i < mb.size(); ++i) Qm(i, i) += cushion;
    // Absorb the rationalization defect. Each corrected entry lies in a block
    // whose generator is a single monomial (the main block, or a multiplier
    // block on a monomial constraint), so entries map bijectively onto
    // identity rows and corrections never disturb other rows. The final
    // exact replay re-checks positive semidefiniteness of every block.
    Poly defect = residual - gram_poly_over(vars, mb, Qm);
    auto slots_in = [&](const std::vector<Monomial>& basis, const Monomial& m,
                        std::vector<std::pair<int, int>>& slots, Rational& wsum) {
      std::map<Monomial, int, GradedLex> index;
      for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = static_cast<int>(i);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        bool fits = true;
        Monomial rest = m;
        for (std::size_t k = 0; k < rest.exps.size(); ++k) {
          if (rest.exps[k] < basis[i].exps[k]) {
            fits = false;
            break;
          }
          rest.exps[k] -= basis[i].exps[k];
        }
        if (!fits) continue;
        auto ij = index.find(rest);
        if (ij == index.end() || ij->second < static_cast<int>(i)) continue;
        slots.push_back({static_cast<int>(i), ij->second});
        wsum += Rational(static_cast<int>(i) == ij->second ? 1 : 4);
      }
    };
    auto apply_slots = [](RatMatrix& Q, const std::vector<std::pair<int, int>>& slots,
                          const Rational& wsum, const Rational& c) {
      for (auto [i, j] : slots) {
        if (i == j) {
          Q(i, i) += c / wsum;
        } else {
          Rational d = c * Rational(2) / wsum;
          Q(i, j) += d;
          Q(j, i) += d;
        }
      }
    };
    for (const auto& [m, c] : defect.terms()) {
      // Single-monomial equality multipliers are free variables, so they host
      // a defect with no definiteness risk at all.
      bool placed = false;
      for (std::size_t e = 0; e < eqs.size() && !placed; ++e) {
        if (eqs[e].term_count() != 1) continue;
        const auto& [hm, hc] = *eqs[e].terms().begin();
        bool fits = true;
        Monomial rest = m;
        for (std::size_t k = 0; k < rest.exps.size(); ++k) {
          if (rest.exps[k] < hm.exps[k]) {
            fits = false;
            break;
          }
          rest.exps[k] -= hm.exps[k];
        }
        if (!fits) continue;
        eq_mults[e].add_term(rest, c / hc);
        placed = true;
      }
      if (placed) continue;
      std::vector<std::pair<int, int>> slots;
      Rational wsum(0);
      slots_in(mb, m, slots, wsum);
      if (!slots.empty()) {
        apply_slots(Qm, slots, wsum, c);
        continue;
      }
      for (std::size_t s = 1; s < gens.size() && !placed; ++s) {
        if (!grams[s] || gens[s].scaled.term_count() != 1) continue;
        const auto& [gm, gc] = *gens[s].scaled.terms().begin();
        bool fits = true;
        Monomial rest = m;
        for (std::size_t k = 0; k < rest.exps.size(); ++k) {
          if (rest.exps[k] < gm.exps[k]) {
            fits = false;
            break;
          }
          rest.exps[k] -= gm.exps[k];
        }
        if (!fits) continue;
        slots.clear();
        wsum = Rational(0);
        slots_in(bases[s], rest, slots, wsum);
        if (slots.empty()) continue;
        apply_slots(*grams[s], slots, wsum, c / gc);
        placed = true;
      }
      if (!placed) {
        if (std::getenv("SWCERT_SOS_DEBUG")) {
          std::string ms;
          for (auto e : m.exps) ms += std::to_string(e) + ",";
          std::fprintf(stderr, "[sos] reconstruct fail: defect monomial %s (coeff %s) has no slot\n",
                       ms.c_str(), c.str().c_str());
        }
        return std::nullopt;
      }
    }
    if (!ldlt_analyze(Qm).psd) {
      if (std::getenv("SWCERT_SOS_DEBUG"))
        std::fprintf(stderr, "[sos] reconstruct fail: corrected main Gram lost positive semidefiniteness\n");
      return std::nullopt;
    }

    // Unscale into a certificate over the original constraint polynomials.
    SosCertificate cert;
    cert.vars = vars;
    cert.target = target;
    {
      SosBlock main;
      main.generator = Poly::constant(Rational(1), vars);
      main.basis = mb;
      main.gram = Qm;
      for (Eigen::Index i = 0; i < main.gram.rows(); ++i)
        for (Eigen::Index j = 0; j < main.gram.cols(); ++j) main.gram(i, j) *= sT;
      cert.blocks.push_back(std::move(main));
    }
    for (std::size_t s = 1; s < gens.size(); ++s) {
      if (!grams[s]) continue;
      SosBlock blk;
      blk.generator = gens[s].original;
      blk.basis = bases[s];
      blk.gram = *grams[s];
      Rational f = sT / gens[s].scale;
      for (Eigen::Index i = 0; i < blk.gram.rows(); ++i)
        for (Eigen::Index j = 0; j < blk.gram.cols(); ++j) blk.gram(i, j) *= f;
      cert.blocks.push_back(std::move(blk));
    }
    for (std::size_t e = 0; e < eqs.size(); ++e) {
      if (eq_mults[e].is_zero()) continue;
      cert.eqs.push_back(
          EqMultiplier{eqs[e].scaled(eq_scale[e]), eq_mults[e].scaled(sT / eq_scale[e])});
    }
    cert.eps = eps * sT;
    cert.eps_power = eps_power;

    Certificate out;
    out.kind = Certificate::Kind::Sos;
    out.sos = std::move(cert);
    std::string err;
    auto replayed = replay_certificate(out, &err);
    if (replayed && *replayed == target) return out;
    if (std::getenv("SWCERT_SOS_DEBUG")) {
      std::fprintf(stderr, "[sos] reconstruct fail: replay (%s)\n", err.c_str());
      for (std::size_t bi = 0; bi < out.sos->blocks.size(); ++bi) {
        LdltResult lr = ldlt_analyze(out.sos->blocks[bi].gram);
        std::fprintf(stderr, "      block %zu gen=%s n=%zu psd=%d\n", bi,
                     out.sos->blocks[bi].generator.str().c_str(), out.sos->blocks[bi].basis.size(),
                     lr.psd ? 1 : 0);
      }
    }

    return std::nullopt;
  };

  std::vector<Rational> ladder = strict ? opt.eps_ladder : std::vector<Rational>{Rational(0)};

  for (const Rational& eps : ladder) {
    Poly rhsPoly = targetScaled - W.scaled(eps);

    auto restrict_support = [&](const std::vector<std::vector<Monomial>>& bases,
                                const SdpSolution& sol) {
      std::vector<std::vector<Monomial>> active(gens.size());
      for (std::size_t s = 0; s < gens.size(); ++s) {
        const auto& B = bases[s];
        double max_diag = 1.0;
        for (std::size_t i = 0; i < B.size(); ++i)
          if (sol.blocks[s].size())
            max_diag = std::max(max_diag, sol.blocks[s](static_cast<Eigen::Index>(i),
                                                        static_cast<Eigen::Index>(i)));
        for (std::size_t i = 0; i < B.size(); ++i) {
          double d = sol.blocks[s].size() ? sol.blocks[s](static_cast<Eigen::Index>(i),
                                                          static_cast<Eigen::Index>(i))
                                          : 0.0;
          if (d > 1e-5 * max_diag) active[s].push_back(B[i]);
        }
      }
      if (active[0].empty()) active[0] = bases[0];
      return active;
    };

    // Support refinement: restricting one block can pin entries of another
    // to zero, so iterate until the detected support stabilizes, then polish
    // with an eigenvalue margin if the boundary solution resists exact
    // rationalization.
    std::vector<std::vector<Monomial>> bases = full_bases;
    for (int round = 0; round < 4; ++round) {
      SdpProblem prob;
      if (!assemble(bases, rhsPoly, prob)) break;
      SdpOptions sopt = opt.sdp;
      sopt.margin = 0.0;
      if (round > 0) {
        sopt.tol = 1e-10;
        sopt.max_iter = 3 * opt.sdp.max_iter;
      }
      SdpSolution sol = solve_sdp(prob, sopt);
      if (std::getenv("SWCERT_SOS_DEBUG"))
        std::fprintf(stderr, "[sos] eps=%s round=%d feas=%d resid=%.3g iters=%d vars=%d rows=%zu\n",
                     eps.str().c_str(), round, sol.feasible ? 1 : 0, sol.residual, sol.iterations,
                     prob.var_count(), prob.rows.size());
      if (!sol.feasible && sol.residual > 1e-4) break;
      if (sol.feasible)
        if (auto cert = reconstruct(sol, bases, eps, rhsPoly, opt.denom_bound)) return cert;

      std::vector<std::vector<Monomial>> next = restrict_support(bases, sol);
      if (next == bases) {
        // Structure stable: give rounding room with margin polish runs.
        const double eps_d = eps.to_double();
        for (double margin : {1e-6, 1e-8}) {
          if (strict && eps_d > 0 && margin > 0.1 * eps_d) continue;
          SdpOptions sopt2 = opt.sdp;
          sopt2.margin = margin;
          sopt2.tol = std::min(3e-8, margin * 1e-2);
          sopt2.max_iter = 3 * opt.sdp.max_iter;
          SdpSolution sol2 = solve_sdp(prob, sopt2);
          if (std::getenv("SWCERT_SOS_DEBUG"))
            std::fprintf(stderr, "[sos] polish margin=%.0e feas=%d resid=%.3g iters=%d\n", margin,
                         sol2.feasible ? 1 : 0, sol2.residual, sol2.iterations);
          if (!sol2.feasible) continue;
          if (auto cert = reconstruct(sol2, bases, eps, rhsPoly, opt.denom_bound)) return cert;
          if (auto cert = reconstruct(sol2, bases, eps, rhsPoly, BigInt(1) << 62)) return cert;
        }
        break;
      }
      bases = std::move(next);
    }
  }
  return std::nullopt;
}

std::optional<Certificate> prove_on_set(const Poly& target_in, const ConstraintSystem& sys, bool strict,
                                        bool excluded_origin, const std::vector<std::string>& vars,
                                        const SosOptions& opt) {
  Poly target = target_in.aligned_to(vars);

  if (target.is_constant()) {
    const Rational c = target.constant_term();
    if (strict ? c.sign() > 0 : c.sign() >= 0) {
      SosCertificate cert;
      cert.vars = vars;
      cert.target = target;
      if (!c.is_zero()) {
        SosBlock blk;
        blk.generator = Poly::constant(Rational(1), vars);
        blk.basis = {Monomial{std::vector<unsigned>(vars.size(), 0)}};
        RatMatrix Q(1, 1);
        Q(0, 0) = c;
        blk.gram = Q;
        cert.blocks.push_back(std::move(blk));
      }
      cert.eps = Rational(0);
      cert.eps_power = 0;
      Certificate out;
      out.kind = Certificate::Kind::Sos;
      out.sos = std::move(cert);
      return out;
    }
    return std::nullopt;
  }

  // Equality-multiple fast path: target vanishes identically on h = 0.
  if (!strict) {
    for (const auto& h : sys.equalities) {
      auto q = exact_divide(target, h.aligned_to(vars));
      if (q) {
        SosCertificate cert;
        cert.vars = vars;
        cert.target = target;
        cert.eps = Rational(0);
        cert.eps_power = 0;
        cert.eqs.push_back(EqMultiplier{h.aligned_to(vars), *q});
        Certificate out;
        out.kind = Certificate::Kind::Sos;
        out.sos = std::move(cert);
        return out;
      }
    }
  }

  // Global quadratic-form fast path (a globally PSD/PD form is in particular
  // nonnegative/positive on the constraint set).
  if ((!strict || excluded_origin) && target.degree() == 2) {
    auto Q = quadratic_form(target);
    if (Q) {
      LdltResult r = ldlt_analyze(*Q);
      if (strict ? r.pd : r.psd) {
        PdCertificate pd;
        pd.vars = vars;
        pd.gram = *Q;
        pd.perm = r.perm;
        pd.L = r.L;
        pd.D = r.D;
        pd.strict = strict;
        Certificate out;
        out.kind = Certificate::Kind::PdFactorization;
        out.pd = std::move(pd);
        return out;
      }
    }
  }

  return find_sos_certificate(target, sys.inequalities, sys.equalities, strict, excluded_origin, vars, opt);
}

}  // namespace swcert
