#pragma once

// Truncations of the coefficient-space operators: differentiation D_k,
// conversion S_k, multiplication M_0[a] / M_k[a] and indefinite integration Q.

#include "specsolve/almost_banded.hpp"
#include "specsolve/cheb.hpp"

namespace specsolve {

struct OperatorTruncation {
  AlmostBandedMatrix matrix;
  Basis row_basis;  // basis indexing the output coefficients
  Basis col_basis;  // basis indexing the input coefficients

  Index rows() const { return matrix.rows(); }
  Index cols() const { return matrix.cols(); }
  OperatorTruncation cropped(Index rows, Index cols) const { return {matrix.cropped(rows, cols), row_basis, col_basis}; }
};

/// Entry (i, j) of Q, the coefficient map of  v -> int_{-1}^x v(t) dt.
/// Column j holds the T-coefficients of the antiderivative of T_j vanishing at -1.
template <class Scalar>
Scalar integration_entry(Index i, Index j) {
  if (j == 0) return (i == 0 || i == 1) ? Scalar(1) : Scalar(0);
  if (j == 1) {
    if (i == 0) return Scalar(-1) / Scalar(4);
    if (i == 2) return Scalar(1) / Scalar(4);
    return Scalar(0);
  }
  if (i == 0) return Scalar((j % 2 == 1) ? 1 : -1) / Scalar((j - 1) * (j + 1));
  if (i == j + 1) return Scalar(1) / Scalar(2 * (j + 1));
  if (i == j - 1) return Scalar(-1) / Scalar(2 * (j - 1));
  return Scalar(0);
}

/// Dense n x n truncation of Q in any scalar type.
template <class Scalar>
Mat<Scalar> dense_integration_matrix(Index n) {
  Mat<Scalar> q = Mat<Scalar>::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    q(0, j) = integration_entry<Scalar>(0, j);
    for (Index i = std::max<Index>(1, j - 1); i <= std::min(n - 1, j + 1); ++i) q(i, j) = integration_entry<Scalar>(i, j);
  }
  return q;
}

/// Applies Q^power to a T-coefficient vector without truncation (length grows by `power`).
template <class Scalar>
Vec<Scalar> integrate_coeffs(const Vec<Scalar>& c, int power = 1) {
  Vec<Scalar> cur = c;
  for (int p = 0; p < power; ++p) {
    const Index n = cur.size();
    Vec<Scalar> out = Vec<Scalar>::Zero(n + 1);
    for (Index j = 0; j < n; ++j) {
      if (cur[j] == Scalar(0)) continue;
      out[0] += integration_entry<Scalar>(0, j) * cur[j];
      for (Index i = std::max<Index>(1, j - 1); i <= j + 1; ++i) out[i] += integration_entry<Scalar>(i, j) * cur[j];
    }
    cur = std::move(out);
  }
  return cur;
}

/// D_k: T-coefficients to C^{(k)}-coefficients of the k-th derivative.
OperatorTruncation diff_op(int k, Index n);
/// S_k: C^{(k)} to C^{(k+1)} (S_0: T to C^{(1)}).
OperatorTruncation conv_op(int k, Index n);
/// S_{to-1} ... S_{from}; identity (tagged level_basis(from)) when from == to.
OperatorTruncation conv_chain(int from, int to, Index n);
/// M_0[a] (Toeplitz + Hankel) for a in the Chebyshev basis.
OperatorTruncation mult_op_cheb(const ChebSeries<double>& a, Index n);
/// M_k[a] in the C^{(k)} basis, by conjugating M_0[a] with the conversion chain.
OperatorTruncation mult_op_ultra(const ChebSeries<double>& a, int k, Index n);
/// Q, the indefinite integral from -1, with its dense first row.
OperatorTruncation integration_op(Index n);
/// A * B; requires A.col_basis == B.row_basis.
OperatorTruncation compose(const OperatorTruncation& a, const OperatorTruncation& b);
/// Q^power at size n, computed at n + power and cropped so truncation never leaks into kept entries.
OperatorTruncation integration_power(int power, Index n);

/// 2^{k-1} (k-1)!, the scale of D_k.
double diff_scale(int k);

}  // namespace specsolve
