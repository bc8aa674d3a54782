#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace swcert {

/// Small dense semidefinite feasibility problem: find PSD blocks X_b (with a
/// uniform eigenvalue margin) and free variables f satisfying the affine
/// rows. Variables are the upper triangles of the blocks followed by the free
/// vector; off-diagonal coefficients refer to the (i,j) upper entry with the
/// symmetric entry implied.
struct SdpProblem {
  std::vector<int> block_sizes;
  int n_free = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;  // (variable index, coefficient)
  std::vector<double> rhs;

  int tri_size(int b) const { return block_sizes[b] * (block_sizes[b] + 1) / 2; }
  int block_offset(int b) const;
  int var_count() const;
  /// Upper-triangular index of entry (i,j), i <= j, of block b.
  int entry_index(int b, int i, int j) const;
};

struct SdpOptions {
  double margin = 1e-6;   // eigenvalue floor for every block
  int max_iter = 12000;
  double tol = 3e-8;      // affine residual (inf norm) at a cone-feasible point
};

struct SdpSolution {
  bool feasible = false;
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd free_vars;
  double residual = 0.0;
  int iterations = 0;
};

/// Alternating projections (affine subspace vs. shifted PSD cone) with a
/// Dykstra correction on the cone step. Deterministic. Adequate for the desk
/// scale this project needs (blocks up to ~30x30).
SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt = {});

}  // namespace swcert
