#include "swcert/synth.hpp"

#include <algorithm>
#include <cmath>

#include "swcert/sos.hpp"

namespace swcert {

Poly rationalize(const NumericSolution& n, const BigInt& denom_bound) {
  Poly out(n.vars);
  for (std::size_t i = 0; i < n.monomials.size(); ++i) {
    double c = n.coeffs(static_cast<Eigen::Index>(i));
    if (!std::isfinite(c)) throw std::domain_error("rationalize: non-finite coefficient");
    Rational rc = rationalize_double(c, denom_bound);
    if (!rc.is_zero()) out.add_term(n.monomials[i], rc);
  }
  return out;
}

Poly truncate_small_terms(const Poly& p, const Rational& rel_threshold, TruncationReport* report) {
  if (p.is_zero()) throw std::domain_error("truncate_small_terms: zero polynomial");
  const Rational cutoff = p.max_abs_coeff() * rel_threshold;
  Poly out(p.vars());
  TruncationReport rep;
  rep.threshold_abs = cutoff;
  for (const auto& [m, c] : p.terms()) {
    if (abs(c) < cutoff)
      rep.dropped.push_back({m, c});
    else
      out.add_term(m, c);
  }
  if (out.is_zero()) throw std::domain_error("truncate_small_terms: threshold drops every term");
  if (report) *report = std::move(rep);
  return out;
}

namespace {

Monomial mono_add(const Monomial& a, const Monomial& b) {
  Monomial m = a;
  for (std::size_t i = 0; i < m.exps.size(); ++i) m.exps[i] += b.exps[i];
  return m;
}

/// System matrix of a linear homogeneous vector field over the state
/// variables; nullopt if any right-hand side is nonlinear or affine.
std::optional<Eigen::MatrixXd> linear_system_matrix(const SwitchedModel& m, const Mode& mode) {
  const auto& sv = m.state_vars;
  const std::size_t n = sv.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = mode.field.rhs.find(sv[i]);
    if (it == mode.field.rhs.end()) return std::nullopt;
    const Poly& f = it->second;
    if (f.degree() > 1 || !f.constant_term().is_zero()) return std::nullopt;
    for (const auto& [mon, c] : f.terms()) {
      if (mon.is_constant()) return std::nullopt;
      int which = -1;
      for (std::size_t k = 0; k < f.vars().size(); ++k)
        if (mon.exps[k] == 1) which = static_cast<int>(k);
      if (which < 0) return std::nullopt;
      auto pos = std::find(sv.begin(), sv.end(), f.vars()[which]);
      if (pos == sv.end()) return std::nullopt;
      A(i, static_cast<Eigen::Index>(pos - sv.begin())) = c.to_double();
    }
  }
  return A;
}

NumericSolution gram_to_numeric(const std::vector<std::string>& vars, const std::vector<Monomial>& lin,
                                const Eigen::MatrixXd& G, double diag_shift, double margin) {
  NumericSolution num;
  num.vars = vars;
  num.margin = margin;
  const int nb = static_cast<int>(lin.size());
  Eigen::VectorXd coeffs(nb * (nb + 1) / 2);
  int k = 0;
  for (int i = 0; i < nb; ++i)
    for (int j = i; j < nb; ++j) {
      num.monomials.push_back(mono_add(lin[i], lin[j]));
      double gij = G(i, j) + (i == j ? diag_shift : 0.0);
      coeffs(k++) = (i == j) ? gij : 2.0 * gij;
    }
  num.coeffs = std::move(coeffs);
  return num;
}

}  // namespace

std::optional<Poly> synth_common_quadratic(const SwitchedModel& m, const SynthOptions& opt) {
  const std::size_t n = m.state_vars.size();
  if (n == 0 || m.modes.empty()) return std::nullopt;
  const auto& vars = m.state_vars;
  auto lin = monomial_basis(n, 1, 1);
  const int nb = static_cast<int>(lin.size());

  std::vector<Eigen::MatrixXd> As;
  bool all_linear = true;
  for (const auto& mode : m.modes) {
    auto A = linear_system_matrix(m, mode);
    if (!A) {
      all_linear = false;
      break;
    }
    As.push_back(*A);
  }

  if (all_linear) {
    // P >= eta I, A_p^T P + P A_p <= -eta I (margin-maximizing over the eta
    // ladder), trace(P) = n for scale.
    for (double eta : {0.2, 0.05, opt.eta}) {
      SdpProblem prob;
      prob.block_sizes.push_back(nb);  // Pb = P - eta I
      for (std::size_t p = 0; p < As.size(); ++p) prob.block_sizes.push_back(nb);  // S_p
      for (std::size_t p = 0; p < As.size(); ++p) {
        const Eigen::MatrixXd& A = As[p];
        for (int i = 0; i < nb; ++i) {
          for (int j = i; j < nb; ++j) {
            // S_p(i,j) + [A^T P + P A](i,j) = -eta * [i==j], P = Pb + eta I.
            std::vector<std::pair<int, double>> row;
            row.push_back({prob.entry_index(1 + static_cast<int>(p), i, j), 1.0});
            for (int k = 0; k < nb; ++k) {
              if (A(k, i) != 0.0)
                row.push_back({prob.entry_index(0, std::min(k, j), std::max(k, j)), A(k, i)});
              if (A(k, j) != 0.0)
                row.push_back({prob.entry_index(0, std::min(i, k), std::max(i, k)), A(k, j)});
            }
            double rhs = -eta * (A(j, i) + A(i, j));
            if (i == j) rhs -= eta;
            prob.rows.push_back(std::move(row));
            prob.rhs.push_back(rhs);
          }
        }
      }
      {
        std::vector<std::pair<int, double>> row;
        for (int i = 0; i < nb; ++i) row.push_back({prob.entry_index(0, i, i), 1.0});
        prob.rows.push_back(std::move(row));
        prob.rhs.push_back(static_cast<double>(nb) * (1.0 - eta));
      }
      SdpSolution sol = solve_sdp(prob, opt.sdp);
      if (!sol.feasible) continue;
      return rationalize(gram_to_numeric(vars, lin, sol.blocks[0], eta, eta), opt.denom_bound);
    }
    return std::nullopt;
  }

  // Template route for nonlinear modes: joint feasibility of
  //   -Lie_p(V) - eta ||x||^2 = SOS_p + sum_j lambda_j * g_j   (per mode)
  // over a common quadratic template V = z^T G z, G >= 0, trace(G) = n.
  unsigned maxdeg = 2;
  for (const auto& mode : m.modes)
    for (const auto& [v, f] : mode.field.rhs) maxdeg = std::max(maxdeg, f.degree() + 1);
  if (maxdeg % 2) ++maxdeg;

  auto universe = monomial_basis(n, 0, maxdeg);
  std::map<Monomial, int, GradedLex> uidx;
  for (std::size_t i = 0; i < universe.size(); ++i) uidx[universe[i]] = static_cast<int>(i);
  auto sos_basis = monomial_basis(n, 0, maxdeg / 2);
  auto mult_basis = monomial_basis(n, 0, 1);

  SdpProblem prob;
  const int tmpl = 0;
  prob.block_sizes.push_back(nb);
  struct ModeBlocks {
    int sos;
    std::vector<std::pair<int, Poly>> mults;
  };
  std::vector<ModeBlocks> mbs;
  for (const auto& mode : m.modes) {
    ModeBlocks mb;
    mb.sos = static_cast<int>(prob.block_sizes.size());
    prob.block_sizes.push_back(static_cast<int>(sos_basis.size()));
    if (!mode.domain.is_true() && mode.domain.disjuncts.size() == 1) {
      ConstraintSystem sys = constraints_of(mode.domain.closure().disjuncts.front());
      for (const auto& g : sys.inequalities) {
        if (g.degree() + 2 > maxdeg) continue;
        int blk = static_cast<int>(prob.block_sizes.size());
        prob.block_sizes.push_back(static_cast<int>(mult_basis.size()));
        mb.mults.push_back({blk, g.aligned_to(vars)});
      }
    }
    mbs.push_back(std::move(mb));
  }

  for (std::size_t p = 0; p < m.modes.size(); ++p) {
    const Mode& mode = m.modes[p];
    std::vector<std::vector<std::pair<int, double>>> rows(universe.size());
    std::vector<double> rhs(universe.size(), 0.0);
    for (int i = 0; i < nb; ++i) {
      for (int j = i; j < nb; ++j) {
        Poly pij(vars);
        pij.add_term(mono_add(lin[i], lin[j]), Rational(1));
        Poly lie = lie_derivative(pij, mode.field).aligned_to(vars);
        double mult = (i == j) ? 1.0 : 2.0;
        for (const auto& [mo, c] : lie.terms()) {
          auto it = uidx.find(mo);
          if (it == uidx.end()) return std::nullopt;
          rows[it->second].push_back({prob.entry_index(tmpl, i, j), mult * c.to_double()});
        }
      }
    }
    for (int i = 0; i < static_cast<int>(sos_basis.size()); ++i)
      for (int j = i; j < static_cast<int>(sos_basis.size()); ++j) {
        auto it = uidx.find(mono_add(sos_basis[i], sos_basis[j]));
        if (it == uidx.end()) continue;
        rows[it->second].push_back({prob.entry_index(mbs[p].sos, i, j), (i == j) ? 1.0 : 2.0});
      }
    for (auto& [blk, g] : mbs[p].mults) {
      for (int i = 0; i < static_cast<int>(mult_basis.size()); ++i)
        for (int j = i; j < static_cast<int>(mult_basis.size()); ++j)
          for (const auto& [gm, gc] : g.terms()) {
            auto it = uidx.find(mono_add(mono_add(mult_basis[i], mult_basis[j]), gm));
            if (it == uidx.end()) continue;
            rows[it->second].push_back({prob.entry_index(blk, i, j), ((i == j) ? 1.0 : 2.0) * gc.to_double()});
          }
    }
    // Lie(V) + SOS + sum lambda g + eta ||x||^2 = 0.
    for (std::size_t i = 0; i < n; ++i) {
      Monomial sq{std::vector<unsigned>(n, 0)};
      sq.exps[i] = 2;
      rhs[uidx.at(sq)] -= opt.eta;
    }
    for (std::size_t r = 0; r < universe.size(); ++r) {
      if (rows[r].empty() && rhs[r] == 0.0) continue;
      prob.rows.push_back(std::move(rows[r]));
      prob.rhs.push_back(rhs[r]);
    }
  }
  {
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < nb; ++i) row.push_back({prob.entry_index(tmpl, i, i), 1.0});
    prob.rows.push_back(std::move(row));
    prob.rhs.push_back(static_cast<double>(nb));
  }
  SdpSolution sol = solve_sdp(prob, opt.sdp);
  if (!sol.feasible) return std::nullopt;
  Poly cand = rationalize(gram_to_numeric(vars, lin, sol.blocks[0], 0.0, opt.eta), opt.denom_bound);
  if (cand.is_zero()) return std::nullopt;
  return cand;
}

std::optional<LyapunovAssignment> synth_multiple(const SwitchedModel& m, const SynthOptions& opt) {
  if (m.modes.size() == 1) {
    auto V = synth_common_quadratic(m, opt);
    if (!V) return std::nullopt;
    LyapunovAssignment a;
    a.V[m.modes[0].id] = *V;
    return a;
  }
  if (m.kind != SwitchKind::StateDependent && m.kind != SwitchKind::Guarded) return std::nullopt;

  const auto& vars = m.state_vars;
  const std::size_t n = vars.size();
  auto lin = monomial_basis(n, 1, 1);
  const int nb = static_cast<int>(lin.size());

  std::vector<Eigen::MatrixXd> As;
  for (const auto& mode : m.modes) {
    auto A = linear_system_matrix(m, mode);
    if (!A) return std::nullopt;  // nonlinear multi-mode synthesis not attempted
    As.push_back(*A);
  }

  auto atom_gram = [&](const Poly& p) -> std::optional<Eigen::MatrixXd> {
    auto Q = quadratic_form(p.aligned_to(vars));
    if (!Q) return std::nullopt;
    Eigen::MatrixXd G(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) G(i, j) = (*Q)(i, j).to_double();
    return G;
  };

  for (double eta : {0.1, opt.eta}) {
    SdpProblem prob;
    std::vector<int> Pblk(m.modes.size());
    for (std::size_t p = 0; p < m.modes.size(); ++p) {
      Pblk[p] = static_cast<int>(prob.block_sizes.size());
      prob.block_sizes.push_back(nb);  // P_p - eta I
    }
    struct LieGroup {
      int Sblk;
      std::vector<std::pair<int, Eigen::MatrixXd>> mults;
    };
    std::vector<LieGroup> lies;
    for (std::size_t p = 0; p < m.modes.size(); ++p) {
      LieGroup lg;
      lg.Sblk = static_cast<int>(prob.block_sizes.size());
      prob.block_sizes.push_back(nb);
      if (!m.modes[p].domain.is_true() && m.modes[p].domain.disjuncts.size() == 1) {
        ConstraintSystem sys = constraints_of(m.modes[p].domain.closure().disjuncts.front());
        for (const auto& g : sys.inequalities) {
          auto G = atom_gram(g);
          if (!G) continue;
          int blk = static_cast<int>(prob.block_sizes.size());
          prob.block_sizes.push_back(1);
          lg.mults.push_back({blk, *G});
        }
      }
      lies.push_back(std::move(lg));
    }
    struct Coupling {
      std::size_t p, q;
      std::vector<Eigen::MatrixXd> eq_grams;
      int free_off = -1;
      bool descent = false;
      std::vector<std::pair<int, Eigen::MatrixXd>> guard_mults;
      int slack_blk = -1;
    };
    std::vector<Coupling> couplings;
    int n_free = 0;
    if (m.kind == SwitchKind::StateDependent) {
      for (std::size_t p = 0; p < m.modes.size(); ++p) {
        for (std::size_t q = p + 1; q < m.modes.size(); ++q) {
          Predicate overlap = m.modes[p].domain.and_with(m.modes[q].domain);
          overlap.canonicalize();
          bool empty = overlap.is_false() || std::all_of(overlap.disjuncts.begin(),
                                                         overlap.disjuncts.end(), conjunct_unsatisfiable);
          if (empty) continue;
          Coupling c;
          c.p = p;
          c.q = q;
          if (overlap.disjuncts.size() == 1) {
            ConstraintSystem sys = constraints_of(overlap.disjuncts.front());
            for (const auto& h : sys.equalities) {
              auto G = atom_gram(h);
              if (G) c.eq_grams.push_back(*G);
            }
          }
          c.free_off = n_free;
          n_free += static_cast<int>(c.eq_grams.size());
          couplings.push_back(std::move(c));
        }
      }
    } else {
      for (const auto& t : m.transitions) {
        auto pi = std::find_if(m.modes.begin(), m.modes.end(),
                               [&](const Mode& md) { return md.id == t.from; });
        auto qi = std::find_if(m.modes.begin(), m.modes.end(),
                               [&](const Mode& md) { return md.id == t.to; });
        if (pi == m.modes.end() || qi == m.modes.end()) return std::nullopt;
        if (pi == qi) continue;
        Coupling c;
        c.p = static_cast<std::size_t>(pi - m.modes.begin());
        c.q = static_cast<std::size_t>(qi - m.modes.begin());
        c.descent = true;
        c.slack_blk = static_cast<int>(prob.block_sizes.size());
        prob.block_sizes.push_back(nb);
        if (!t.guard.is_true() && t.guard.disjuncts.size() == 1) {
          ConstraintSystem sys = constraints_of(t.guard.disjuncts.front());
          for (const auto& g : sys.inequalities) {
            auto G = atom_gram(g);
            if (!G) continue;  // non-quadratic guard atoms weaken the search only
            int blk = static_cast<int>(prob.block_sizes.size());
            prob.block_sizes.push_back(1);
            c.guard_mults.push_back({blk, *G});
          }
        }
        couplings.push_back(std::move(c));
      }
    }
    prob.n_free = n_free;
    const int free_base = [&] {
      int s = 0;
      for (std::size_t bi = 0; bi < prob.block_sizes.size(); ++bi)
        s += prob.tri_size(static_cast<int>(bi));
      return s;
    }();

    for (std::size_t p = 0; p < m.modes.size(); ++p) {
      const Eigen::MatrixXd& A = As[p];
      for (int i = 0; i < nb; ++i) {
        for (int j = i; j < nb; ++j) {
          // S_p + A^T P + P A + tau * Dom = -eta I (P = Pb + eta I).
          std::vector<std::pair<int, double>> row;
          row.push_back({prob.entry_index(lies[p].Sblk, i, j), 1.0});
          for (int k = 0; k < nb; ++k) {
            if (A(k, i) != 0.0)
              row.push_back({prob.entry_index(Pblk[p], std::min(k, j), std::max(k, j)), A(k, i)});
            if (A(k, j) != 0.0)
              row.push_back({prob.entry_index(Pblk[p], std::min(i, k), std::max(i, k)), A(k, j)});
          }
          for (auto& [blk, G] : lies[p].mults)
            if (G(i, j) != 0.0) row.push_back({prob.entry_index(blk, 0, 0), 2.0 * G(i, j)});
          double rhs = -eta * (A(j, i) + A(i, j));
          if (i == j) rhs -= eta;
          prob.rows.push_back(std::move(row));
          prob.rhs.push_back(rhs);
        }
      }
    }
    for (const auto& c : couplings) {
      for (int i = 0; i < nb; ++i) {
        for (int j = i; j < nb; ++j) {
          std::vector<std::pair<int, double>> row;
          row.push_back({prob.entry_index(Pblk[c.p], i, j), 1.0});
          row.push_back({prob.entry_index(Pblk[c.q], i, j), -1.0});
          if (c.descent) {
            row.push_back({prob.entry_index(c.slack_blk, i, j), -1.0});
            for (auto& [blk, G] : c.guard_mults)
              if (G(i, j) != 0.0) row.push_back({prob.entry_index(blk, 0, 0), -2.0 * G(i, j)});
          } else {
            for (std::size_t k = 0; k < c.eq_grams.size(); ++k) {
              double g = c.eq_grams[k](i, j);
              if (g != 0.0) row.push_back({free_base + c.free_off + static_cast<int>(k), -g});
            }
          }
          prob.rows.push_back(std::move(row));
          prob.rhs.push_back(0.0);
        }
      }
    }
    {
      std::vector<std::pair<int, double>> row;
      for (std::size_t p = 0; p < m.modes.size(); ++p)
        for (int i = 0; i < nb; ++i) row.push_back({prob.entry_index(Pblk[p], i, i), 1.0});
      prob.rows.push_back(std::move(row));
      prob.rhs.push_back(static_cast<double>(nb * m.modes.size()) * (1.0 - eta));
    }

    SdpSolution sol = solve_sdp(prob, opt.sdp);
    if (!sol.feasible) continue;

    LyapunovAssignment out;
    for (std::size_t p = 0; p < m.modes.size(); ++p)
      out.V[m.modes[p].id] =
          rationalize(gram_to_numeric(vars, lin, sol.blocks[Pblk[p]], eta, eta), opt.denom_bound);
    return out;
  }
  return std::nullopt;
}

}  // namespace swcert
