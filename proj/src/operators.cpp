#include "specsolve/operators.hpp"

#include <cmath>

namespace specsolve {

double diff_scale(int k) {
  double s = std::ldexp(1.0, k - 1);
  for (int i = 2; i < k; ++i) s *= i;
  return s;
}

OperatorTruncation diff_op(int k, Index n) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "diff_op: order must be >= 1");
  if (n <= k) throw Error(ErrorKind::InvalidTruncation, "diff_op: truncation must exceed the order");
  AlmostBandedMatrix d(n, n, 0, k, 0);
  const double scale = diff_scale(k);
  for (Index i = 0; i + k < n; ++i) d.set(i, i + k, scale * static_cast<double>(i + k));
  return {std::move(d), Basis::ultraspherical(k), Basis::chebyshev()};
}

OperatorTruncation conv_op(int k, Index n) {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "conv_op: level must be >= 0");
  if (n < 1) throw Error(ErrorKind::InvalidTruncation, "conv_op: empty truncation");
  AlmostBandedMatrix s(n, n, 0, 2, 0);
  for (Index j = 0; j < n; ++j) {
    if (k == 0) {
      s.set(j, j, j == 0 ? 1.0 : 0.5);
      if (j + 2 < n) s.set(j, j + 2, -0.5);
    } else {
      const double kk = k;
      s.set(j, j, j == 0 ? 1.0 : kk / (kk + static_cast<double>(j)));
      if (j + 2 < n) s.set(j, j + 2, -kk / (kk + static_cast<double>(j + 2)));
    }
  }
  return {std::move(s), Basis::ultraspherical(k + 1), Basis::level_basis(k)};
}

OperatorTruncation conv_chain(int from, int to, Index n) {
  if (from > to) throw Error(ErrorKind::InvalidArgument, "conv_chain: from > to");
  OperatorTruncation out{AlmostBandedMatrix::identity(n), Basis::level_basis(from), Basis::level_basis(from)};
  for (int k = from; k < to; ++k) out = compose(conv_op(k, n), out);
  return out;
}

OperatorTruncation mult_op_cheb(const ChebSeries<double>& a, Index n) {
  if (a.basis != Basis::chebyshev()) throw Error(ErrorKind::BasisMismatch, "mult_op_cheb needs a Chebyshev series");
  const ChebSeries<double> at = a.trimmed();
  const Index d = at.degree();
  const VectorXd& c = at.coeffs;
  auto coef = [&](Index s) { return s < c.size() ? c[s] : 0.0; };
  AlmostBandedMatrix m(n, n, d, d, 0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = std::max<Index>(0, i - d); j <= std::min(n - 1, i + d); ++j) {
      const Index t = i > j ? i - j : j - i;
      double v = (t == 0) ? coef(0) : 0.5 * coef(t);
      if (i >= 1) v += 0.5 * coef(i + j);
      m.set(i, j, v);
    }
  }
  return {std::move(m), Basis::chebyshev(), Basis::chebyshev()};
}

OperatorTruncation mult_op_ultra(const ChebSeries<double>& a, int k, Index n) {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "mult_op_ultra: level must be >= 0");
  if (k == 0) return mult_op_cheb(a, n);
  const ChebSeries<double> at = a.trimmed();
  const Index d = at.degree();
  // Rows i < n of S M_0 need M_0 rows up to n + 2k; columns < n of the
  // right-division only see the leading block of the triangular chain.
  const Index p = n + 2 * k;
  const OperatorTruncation m0 = mult_op_cheb(at, p);
  const OperatorTruncation chain = conv_chain(0, k, p);
  const OperatorTruncation y = compose(chain, m0);

  std::vector<OperatorTruncation> factors;
  for (int t = 0; t < k; ++t) factors.push_back(conv_op(t, p));

  AlmostBandedMatrix out(n, n, d, d, 0);
  std::vector<double> z(static_cast<std::size_t>(p), 0.0);
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - d);
    const Index hi = std::min<Index>(n, i + d + 1);
    for (Index j = lo; j < hi; ++j) z[j] = y.matrix.get(i, j);
    // z <- z S_t^{-1} for t = 0..k-1, i.e. Y (S_{k-1} ... S_0)^{-1}
    for (int t = 0; t < k; ++t) {
      const AlmostBandedMatrix& s = factors[t].matrix;
      for (Index j = lo; j < hi; ++j) {
        double v = z[j];
        if (j - 2 >= lo) v -= z[j - 2] * s.get(j - 2, j);
        const double diag = s.get(j, j);
        if (diag == 0.0) throw Error(ErrorKind::InternalError, "mult_op_ultra: singular conversion operator");
        z[j] = v / diag;
      }
    }
    for (Index j = lo; j < hi; ++j) {
      out.set(i, j, z[j]);
      z[j] = 0.0;
    }
  }
  return {std::move(out), Basis::ultraspherical(k), Basis::ultraspherical(k)};
}

OperatorTruncation integration_op(Index n) {
  if (n < 1) throw Error(ErrorKind::InvalidTruncation, "integration_op: empty truncation");
  AlmostBandedMatrix q(n, n, 1, 1, 1);
  for (Index j = 0; j < n; ++j) {
    q.set(0, j, integration_entry<double>(0, j));
    for (Index i = std::max<Index>(1, j - 1); i <= std::min(n - 1, j + 1); ++i) q.set(i, j, integration_entry<double>(i, j));
  }
  return {std::move(q), Basis::chebyshev(), Basis::chebyshev()};
}

OperatorTruncation compose(const OperatorTruncation& a, const OperatorTruncation& b) {
  if (a.col_basis != b.row_basis)
    throw Error(ErrorKind::BasisMismatch,
                "compose: inner bases differ (" + a.col_basis.name() + " vs " + b.row_basis.name() + ")");
  return {multiply(a.matrix, b.matrix), a.row_basis, b.col_basis};
}

OperatorTruncation integration_power(int power, Index n) {
  if (power < 0) throw Error(ErrorKind::InvalidArgument, "integration_power: negative power");
  const Index p = n + power;
  OperatorTruncation out{AlmostBandedMatrix::identity(p), Basis::chebyshev(), Basis::chebyshev()};
  const OperatorTruncation q = integration_op(p);
  for (int i = 0; i < power; ++i) out = compose(q, out);
  return out.cropped(n, n);
}

}  // namespace specsolve
