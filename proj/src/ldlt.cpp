#include "swcert/ldlt.hpp"

#include <stdexcept>

namespace swcert {

namespace {

RatVector lift_witness(const RatMatrix& L, const std::vector<int>& perm, int k, const RatVector& w,
                       int n) {
  // Witness w lives in the trailing (n-k) coordinates of the eliminated
  // system. Extend by y1 = -L11^{-T} L21^T w, then undo the permutation.
  RatVector y(n);
  for (int i = 0; i < n; ++i) y(i) = Rational(0);
  for (int i = k; i < n; ++i) y(i) = w(i - k);
  for (int i = k - 1; i >= 0; --i) {
    Rational s(0);
    for (int j = i + 1; j < n; ++j) s += L(j, i) * y(j);
    y(i) = -s;
  }
  RatVector v(n);
  for (int i = 0; i < n; ++i) v(perm[i]) = y(i);
  return v;
}

}  // namespace

LdltResult ldlt_analyze(const RatMatrix& A) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw std::invalid_argument("ldlt_analyze: matrix must be square");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (A(i, j) != A(j, i)) throw std::invalid_argument("ldlt_analyze: matrix must be symmetric");

  LdltResult res;
  res.perm.resize(n);
  for (int i = 0; i < n; ++i) res.perm[i] = i;
  RatMatrix work = A;
  res.L = RatMatrix(n, n);
  res.D = RatVector(n);
  for (int i = 0; i < n; ++i) {
    res.D(i) = Rational(0);
    for (int j = 0; j < n; ++j) res.L(i, j) = Rational(i == j ? 1 : 0);
  }

  int k = 0;
  for (; k < n; ++k) {
    // Pick a positive diagonal pivot among the remaining block.
    int piv = -1;
    for (int i = k; i < n; ++i) {
      if (work(i, i).sign() > 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) break;
    if (piv != k) {
      // Symmetric swap of rows/cols k and piv, plus the computed L rows.
      for (int j = 0; j < n; ++j) std::swap(work(k, j), work(piv, j));
      for (int i = 0; i < n; ++i) std::swap(work(i, k), work(i, piv));
      for (int j = 0; j < k; ++j) std::swap(res.L(k, j), res.L(piv, j));
      std::swap(res.perm[k], res.perm[piv]);
    }
    Rational d = work(k, k);
    res.D(k) = d;
    for (int i = k + 1; i < n; ++i) {
      Rational l = work(i, k) / d;
      res.L(i, k) = l;
      for (int j = k + 1; j <= i; ++j) {
        Rational upd = work(i, j) - l * work(k, j);
        work(i, j) = upd;
        work(j, i) = upd;
      }
      work(i, k) = Rational(0);
      work(k, i) = Rational(0);
    }
  }
  res.rank = k;

  if (k == n) {
    res.pd = true;
    res.psd = true;
    return res;
  }

  // No positive diagonal left. Inspect the trailing block.
  int neg = -1, offi = -1, offj = -1;
  bool zero_block = true;
  for (int i = k; i < n && neg < 0; ++i) {
    if (work(i, i).sign() < 0) neg = i;
  }
  for (int i = k; i < n; ++i)
    for (int j = k; j < n; ++j)
      if (!work(i, j).is_zero()) {
        zero_block = false;
        if (i != j && offi < 0 && work(i, i).is_zero() && work(j, j).is_zero()) {
          offi = i;
          offj = j;
        }
      }

  if (zero_block) {
    res.psd = true;
    // Kernel direction: any trailing unit vector (v^T A v = 0).
    if (k < n) {
      RatVector w(n - k);
      for (int i = 0; i < n - k; ++i) w(i) = Rational(i == 0 ? 1 : 0);
      res.witness = lift_witness(res.L, res.perm, k, w, n);
    }
    return res;
  }

  RatVector w(n - k);
  for (int i = 0; i < n - k; ++i) w(i) = Rational(0);
  if (neg >= 0) {
    w(neg - k) = Rational(1);  // v^T A v = work(neg,neg) < 0
  } else {
    // All trailing diagonals are zero but some off-diagonal work(i,j) != 0:
    // v = t e_i + e_j gives 2 t work(i,j); pick t against the sign.
    if (offi < 0) {
      // Mixed case: some diagonal is zero with nonzero row partner whose
      // diagonal is also handled above; fall back to scanning.
      for (int i = k; i < n && offi < 0; ++i)
        for (int j = k; j < n; ++j)
          if (i != j && !work(i, j).is_zero()) {
            offi = i;
            offj = j;
            break;
          }
    }
    Rational a = work(offi, offi), b = work(offj, offj), c = work(offi, offj);
    // value(t) = a t^2 + 2 c t + b; with a = 0 pick t so that 2 c t + b < 0.
    Rational t = -(b + Rational(1)) / (Rational(2) * c);
    w(offi - k) = t;
    w(offj - k) = Rational(1);
  }
  res.witness = lift_witness(res.L, res.perm, k, w, n);
  return res;
}

bool ldlt_replay(const RatMatrix& A, const std::vector<int>& perm, const RatMatrix& L, const RatVector& D,
                 bool strict) {
  const int n = static_cast<int>(A.rows());
  if (static_cast<int>(perm.size()) != n || L.rows() != n || L.cols() != n || D.size() != n) return false;
  for (int i = 0; i < n; ++i) {
    if (D(i).sign() < 0) return false;
    if (strict && D(i).sign() <= 0) return false;
    if (L(i, i) != Rational(1)) return false;
    for (int j = i + 1; j < n; ++j)
      if (!L(i, j).is_zero()) return false;
  }
  // P A P^T == L D L^T, exactly.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      Rational lhs = A(perm[i], perm[j]);
      Rational rhs(0);
      for (int t = 0; t < n; ++t) rhs += L(i, t) * D(t) * L(j, t);
      if (lhs != rhs) return false;
    }
  }
  return true;
}

}  // namespace swcert
