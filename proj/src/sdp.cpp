#include "swcert/sdp.hpp"

#include <cmath>
#include <limits>

namespace swcert {

int SdpProblem::block_offset(int b) const {
  int off = 0;
  for (int i = 0; i < b; ++i) off += tri_size(i);
  return off;
}

int SdpProblem::var_count() const {
  int n = n_free;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) n += tri_size(static_cast<int>(b));
  return n;
}

int SdpProblem::entry_index(int b, int i, int j) const {
  const int n = block_sizes[b];
  // row-major upper triangle: (0,0),(0,1),...,(0,n-1),(1,1),...
  return block_offset(b) + i * n - i * (i - 1) / 2 + (j - i);
}

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Internally the iterate lives in svec coordinates (off-diagonal entries
// scaled by sqrt(2)) so that the packed Euclidean metric coincides with the
// Frobenius metric; only then are both alternating steps true projections.
void unpack_block(const SdpProblem& p, int b, const Eigen::VectorXd& v, Eigen::MatrixXd& M) {
  const int n = p.block_sizes[b];
  M.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double x = v(p.entry_index(b, i, j));
      if (i != j) x /= kSqrt2;
      M(i, j) = x;
      M(j, i) = x;
    }
}

void pack_block(const SdpProblem& p, int b, const Eigen::MatrixXd& M, Eigen::VectorXd& v) {
  const int n = p.block_sizes[b];
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double x = 0.5 * (M(i, j) + M(j, i));
      v(p.entry_index(b, i, j)) = (i == j) ? x : kSqrt2 * x;
    }
}

// Projection onto {X symmetric : X >= margin I} by eigenvalue clamping.
void project_cone(const SdpProblem& p, Eigen::VectorXd& v, double margin) {
  Eigen::MatrixXd M;
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) {
    if (p.block_sizes[b] == 0) continue;
    unpack_block(p, static_cast<int>(b), v, M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    Eigen::VectorXd ev = es.eigenvalues();
    bool ok = true;
    for (int i = 0; i < ev.size(); ++i)
      if (ev(i) < margin) {
        ev(i) = margin;
        ok = false;
      }
    if (!ok) {
      M = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      pack_block(p, static_cast<int>(b), M, v);
    }
  }
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt) {
  SdpSolution sol;
  const int nvar = p.var_count();
  const int nrow = static_cast<int>(p.rows.size());

  // Column scaling into svec coordinates: x_e = v_e / s_e.
  Eigen::VectorXd svec_scale = Eigen::VectorXd::Ones(nvar);
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) {
    const int n = p.block_sizes[b];
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) svec_scale(p.entry_index(static_cast<int>(b), i, j)) = kSqrt2;
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nrow, nvar);
  Eigen::VectorXd b(nrow);
  for (int r = 0; r < nrow; ++r) {
    for (const auto& [idx, c] : p.rows[r]) A(r, idx) += c / svec_scale(idx);
    b(r) = p.rhs[r];
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);

  auto project_affine = [&](const Eigen::VectorXd& v) {
    if (nrow == 0) return v;
    Eigen::VectorXd out = v;
    out -= cod.solve(A * v - b);
    return out;
  };

  // Douglas-Rachford splitting on (affine subspace, shifted PSD cone); the
  // cone-side point is the candidate solution, so it is exactly
  // cone-feasible and only the affine residual needs watching.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nvar);
  Eigen::VectorXd best = z;
  double best_resid = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    Eigen::VectorXd a = project_affine(z);
    Eigen::VectorXd c = 2.0 * a - z;
    project_cone(p, c, opt.margin);
    z += c - a;
    double resid = nrow ? (A * c - b).lpNorm<Eigen::Infinity>() : 0.0;
    if (resid < best_resid) {
      best_resid = resid;
      best = c;
    }
    if (resid < opt.tol) {
      sol.feasible = true;
      break;
    }
  }

  Eigen::VectorXd v = best;
  sol.residual = best_resid == std::numeric_limits<double>::infinity() ? 0.0 : best_resid;
  sol.iterations = it;
  sol.free_vars.resize(p.n_free);
  const int free_off = nvar - p.n_free;
  for (int i = 0; i < p.n_free; ++i) sol.free_vars(i) = v(free_off + i);
  sol.blocks.resize(p.block_sizes.size());
  for (std::size_t bidx = 0; bidx < p.block_sizes.size(); ++bidx)
    unpack_block(p, static_cast<int>(bidx), v, sol.blocks[bidx]);
  return sol;
}

}  // namespace swcert
