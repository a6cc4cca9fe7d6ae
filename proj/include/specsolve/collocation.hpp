#pragma once

// Rectangular spectral collocation on a GaussLobatto x-grid (N+1 points) and a
// Gauss y-grid (M+1 points, N = M + m), with the Birkhoff pseudospectral
// integration matrix (PSIM) as a right preconditioner.
//
// The grid-level pieces are templated so the PSIM identities can be checked in
// extended precision; the problem-level solvers are double only.

#include <Eigen/LU>

#include <cmath>
#include <optional>
#include <vector>

#include "specsolve/cheb.hpp"
#include "specsolve/operators.hpp"
#include "specsolve/problem.hpp"
#include "specsolve/solvers.hpp"

namespace specsolve {

template <class Scalar = double>
struct PointPair {
  Grid<Scalar> x;  // GaussLobatto, N + 1 points
  Grid<Scalar> y;  // Gauss, M + 1 points
  int m = 1;

  int N() const { return static_cast<int>(x.size()) - 1; }
  int M() const { return static_cast<int>(y.size()) - 1; }
};

template <class Scalar = double>
PointPair<Scalar> make_point_pair(int M, int m) {
  if (M < 0 || m < 1) throw Error(ErrorKind::InvalidArgument, "make_point_pair: need M >= 0 and m >= 1");
  PointPair<Scalar> p;
  p.m = m;
  p.x = cheb_points<Scalar>(M + m, GridKind::GaussLobatto);
  if (M == 0) {
    p.y.kind = GridKind::Gauss;
    p.y.points = Vec<Scalar>::Zero(1);
  } else {
    p.y = cheb_points<Scalar>(M, GridKind::Gauss);
  }
  return p;
}

/// w_j = prod_{n != j} (x_j - x_n)^{-1}.  Mantissas and exponents are tracked
/// separately; a common power of two is divided out only if a weight would
/// otherwise leave the representable range.
template <class Scalar>
Vec<Scalar> bary_weights(const Vec<Scalar>& pts) {
  using std::frexp;
  using std::ldexp;
  const Eigen::Index n = pts.size();
  Vec<Scalar> mant(n);
  std::vector<long> expo(static_cast<std::size_t>(n), 0);
  for (Eigen::Index j = 0; j < n; ++j) {
    Scalar prod(1);
    long e = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      const Scalar d = pts[j] - pts[k];
      if (d == Scalar(0)) throw Error(ErrorKind::InvalidGrid, "bary_weights: duplicate points");
      prod *= d;
      int ei = 0;
      prod = frexp(prod, &ei);
      e += ei;
    }
    mant[j] = Scalar(1) / prod;
    expo[static_cast<std::size_t>(j)] = -e;
  }
  long emax = 0, emin = 0;
  for (long e : expo) {
    emax = std::max(emax, e);
    emin = std::min(emin, e);
  }
  const bool fits = std::is_same_v<Scalar, double> ? (emax < 1000 && emin > -1000) : true;
  const long shift = fits ? 0 : emax;
  Vec<Scalar> w(n);
  for (Eigen::Index j = 0; j < n; ++j) w[j] = ldexp(mant[j], static_cast<int>(expo[static_cast<std::size_t>(j)] - shift));
  return w;
}

/// P^{x->y}: values on `from` to values of the interpolant on `to`.
template <class Scalar>
Mat<Scalar> resampling_matrix(const Vec<Scalar>& from, const Vec<Scalar>& to, const Vec<Scalar>& w) {
  const Eigen::Index nf = from.size(), nt = to.size();
  Mat<Scalar> p = Mat<Scalar>::Zero(nt, nf);
  for (Eigen::Index i = 0; i < nt; ++i) {
    Eigen::Index hit = -1;
    for (Eigen::Index j = 0; j < nf; ++j)
      if (to[i] == from[j]) hit = j;
    if (hit >= 0) {
      p(i, hit) = Scalar(1);
      continue;
    }
    Scalar denom(0);
    for (Eigen::Index j = 0; j < nf; ++j) {
      p(i, j) = w[j] / (to[i] - from[j]);
      denom += p(i, j);
    }
    p.row(i) /= denom;
  }
  return p;
}

template <class Scalar>
Mat<Scalar> resampling_matrix(const Vec<Scalar>& from, const Vec<Scalar>& to) {
  return resampling_matrix<Scalar>(from, to, bary_weights<Scalar>(from));
}

/// D^{(k)}_{x->x}, equal to (D^{(1)})^k.  Orders above one use the recursion
/// D^{(k)}_ij = k (w_j/w_i D^{(k-1)}_ii - D^{(k-1)}_ij) / (x_i - x_j), which
/// loses far less than repeated products; diagonals are negative row sums.
template <class Scalar>
Mat<Scalar> diff_matrix(const Vec<Scalar>& pts, int k) {
  const Eigen::Index n = pts.size();
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "diff_matrix: negative order");
  Mat<Scalar> d = Mat<Scalar>::Identity(n, n);
  if (k == 0) return d;
  const Vec<Scalar> w = bary_weights<Scalar>(pts);
  for (int order = 1; order <= k; ++order) {
    Mat<Scalar> next = Mat<Scalar>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar sum(0);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        next(i, j) = Scalar(order) * ((w[j] / w[i]) * d(i, i) - d(i, j)) / (pts[i] - pts[j]);
        sum += next(i, j);
      }
      next(i, i) = -sum;
    }
    d = std::move(next);
  }
  return d;
}

/// D^{(k)}_{x->y} = P^{x->y} D^{(k)}_{x->x}.
template <class Scalar>
Mat<Scalar> rect_diff_matrix(const Vec<Scalar>& from, const Vec<Scalar>& to, int k) {
  const Mat<Scalar> p = resampling_matrix<Scalar>(from, to);
  if (k == 0) return p;
  return p * diff_matrix<Scalar>(from, k);
}

namespace detail {

/// E(i, k) = T_k at point i of an ascending GaussLobatto grid with n + 1 points.
template <class Scalar>
Mat<Scalar> lobatto_vandermonde(int n, Eigen::Index ncoeffs) {
  Mat<Scalar> e(n + 1, ncoeffs);
  for (int i = 0; i <= n; ++i)
    for (Eigen::Index k = 0; k < ncoeffs; ++k) e(i, k) = cos_pi_ratio<Scalar>(k * (n - i), n);
  return e;
}

/// E(i, k) = T_k at point i of an ascending Gauss grid with K points.
template <class Scalar>
Mat<Scalar> gauss_vandermonde(Eigen::Index K, Eigen::Index ncoeffs) {
  Mat<Scalar> e(K, ncoeffs);
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index k = 0; k < ncoeffs; ++k) e(i, k) = cos_pi_ratio<Scalar>(k * (2 * (K - 1 - i) + 1), 2 * K);
  return e;
}

/// Columns: Chebyshev coefficients of the Lagrange basis on a K-point Gauss grid.
template <class Scalar>
Mat<Scalar> gauss_lagrange_coeffs(Eigen::Index K) {
  Mat<Scalar> c = gauss_vandermonde<Scalar>(K, K).transpose();
  for (Eigen::Index k = 0; k < K; ++k) c.row(k) *= (k == 0 ? Scalar(1) : Scalar(2)) / Scalar(K);
  return c;
}

/// Coefficients of d^k/dx^k x^j, length n.
template <class Scalar>
Vec<Scalar> monomial_derivative_coeffs(int j, int k, Eigen::Index n) {
  if (k > j) return Vec<Scalar>::Zero(n);
  Scalar fac(1);
  for (int t = j - k + 1; t <= j; ++t) fac *= Scalar(t);
  return fac * monomial_coeffs<Scalar>(j - k, n);
}

}  // namespace detail

/// Monomial block pieces for the constraint set, in any scalar.
template <class Scalar>
Mat<Scalar> constraint_monomial_matrix(const std::vector<ConstraintFunctional>& cs) {
  const int m = static_cast<int>(cs.size());
  Mat<Scalar> bx(m, m);
  for (int i = 0; i < m; ++i) {
    const Vec<Scalar> r = cs[i].template row<Scalar>(m);
    for (int j = 0; j < m; ++j) bx(i, j) = r.dot(monomial_coeffs<Scalar>(j, m));
  }
  return bx;
}

template <class Scalar = double>
struct PsimBundle {
  Mat<Scalar> B_full;               // (N+1) x (N+1), [B_j(x_i)]
  std::vector<Mat<Scalar>> Btilde;  // k = 0..m-1: (M+1) x (M+1), [B_j^{(k)}(y_i)], j <= M
  std::vector<Mat<Scalar>> Bhat;    // k = 0..m-1: (M+1) x m, [B_{M+1+j}^{(k)}(y_i)]
  Mat<Scalar> coeffs;               // (N+1) x (N+1): column j holds the T-coefficients of B_j
};

/// Builds every B_j through Chebyshev coefficients: the Lagrange basis on the
/// Gauss grid is transformed exactly, integrated m times by Q, and corrected by
/// the monomials that put the constraint values in place.
template <class Scalar>
PsimBundle<Scalar> birkhoff_psim(const PointPair<Scalar>& pair, const std::vector<ConstraintFunctional>& cs) {
  const int m = pair.m, M = pair.M(), N = pair.N();
  if (static_cast<int>(cs.size()) != m) throw Error(ErrorKind::InvalidArgument, "birkhoff_psim: need m constraints");
  const Eigen::Index K = M + 1, L = N + 1;

  const Mat<Scalar> bx = constraint_monomial_matrix<Scalar>(cs);
  Eigen::FullPivLU<Mat<Scalar>> bx_lu(bx);
  if (!bx_lu.isInvertible())
    throw Error(ErrorKind::IllPosedConstraints, "birkhoff_psim: constraints do not determine the polynomial part");

  const Mat<Scalar> c = detail::gauss_lagrange_coeffs<Scalar>(K);
  // W = Q^m C, exact with N + 1 rows
  Mat<Scalar> w(L, K);
  for (Eigen::Index j = 0; j < K; ++j) w.col(j) = integrate_coeffs<Scalar>(Vec<Scalar>(c.col(j)), m);
  Mat<Scalar> brows(m, L);
  for (int i = 0; i < m; ++i) brows.row(i) = cs[i].template row<Scalar>(L).transpose();
  const Mat<Scalar> g = bx_lu.solve(Mat<Scalar>(brows * w));  // m x K
  Mat<Scalar> x(L, m);
  for (int j = 0; j < m; ++j) x.col(j) = monomial_coeffs<Scalar>(j, L);
  const Mat<Scalar> binv = bx_lu.inverse();

  PsimBundle<Scalar> out;
  out.coeffs.resize(L, L);
  out.coeffs.leftCols(K) = w - x * g;
  out.coeffs.rightCols(m) = x * binv;
  out.B_full = detail::lobatto_vandermonde<Scalar>(N, L) * out.coeffs;

  const Mat<Scalar> vy = detail::gauss_vandermonde<Scalar>(K, L);
  for (int k = 0; k < m; ++k) {
    // d^k of (Q^m C - X G) is Q^{m-k} C - X^{(k)} G; no differentiation of data
    Mat<Scalar> dk = Mat<Scalar>::Zero(L, K);
    for (Eigen::Index j = 0; j < K; ++j) {
      const Vec<Scalar> qc = integrate_coeffs<Scalar>(Vec<Scalar>(c.col(j)), m - k);
      dk.col(j).head(qc.size()) = qc;
    }
    Mat<Scalar> xk(L, m);
    for (int j = 0; j < m; ++j) xk.col(j) = detail::monomial_derivative_coeffs<Scalar>(j, k, L);
    dk -= xk * g;
    out.Btilde.push_back(vy * dk);
    out.Bhat.push_back(vy * (xk * binv));
  }
  return out;
}

/// L_B with B p = L_B p(x) for every p of degree <= N: unit rows for point
/// values on the grid, barycentric rows off the grid, Clenshaw-Curtis weights
/// for the integral, and T^{(q)} rows composed with the grid transform for
/// derivatives.
template <class Scalar>
Mat<Scalar> constraint_disc(const std::vector<ConstraintFunctional>& cs, const Vec<Scalar>& xgrid) {
  const Eigen::Index L = xgrid.size();
  const int N = static_cast<int>(L) - 1;
  Mat<Scalar> out = Mat<Scalar>::Zero(static_cast<Eigen::Index>(cs.size()), L);
  std::optional<Mat<Scalar>> transform;  // values -> coefficients on the grid
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const ConstraintFunctional& f = cs[i];
    const Eigen::Index r = static_cast<Eigen::Index>(i);
    if (f.kind == ConstraintFunctional::Kind::Combination) {
      const Mat<Scalar> sub = constraint_disc<Scalar>(f.parts, xgrid);
      for (std::size_t t = 0; t < f.parts.size(); ++t) out.row(r) += Scalar(f.weights[t]) * sub.row(static_cast<Eigen::Index>(t));
    } else if (f.kind == ConstraintFunctional::Kind::Integral) {
      out.row(r) = cc_weights<Scalar>(N).transpose();
    } else if (f.order == 0) {
      Vec<Scalar> at(1);
      at[0] = Scalar(f.x0);
      out.row(r) = resampling_matrix<Scalar>(xgrid, at).row(0);
    } else {
      if (!transform) {
        transform = Mat<Scalar>(L, L);
        for (Eigen::Index j = 0; j < L; ++j) {
          Vec<Scalar> e = Vec<Scalar>::Zero(L);
          e[j] = Scalar(1);
          transform->col(j) = vals_to_coeffs<Scalar>(e);
        }
      }
      out.row(r) = f.template row<Scalar>(L).transpose() * *transform;
    }
  }
  return out;
}

struct TheoremResiduals {
  double full = 0.0;        // ||[D^{(m)}_{x->y}; L_B] B_full - I||_inf
  double derivative = 0.0;  // ||D^{(m)}_{x->x} B_full - [P^{y->x} | 0]||_inf
  double constraint = 0.0;  // ||L_B B_full - [0 | I_m]||_inf
};

template <class Scalar>
TheoremResiduals theorem_identity_check(const PointPair<Scalar>& pair, const std::vector<ConstraintFunctional>& cs) {
  using std::abs;
  const int m = pair.m;
  const Eigen::Index K = pair.M() + 1, L = pair.N() + 1;
  const PsimBundle<Scalar> b = birkhoff_psim<Scalar>(pair, cs);
  const Mat<Scalar> dxx = diff_matrix<Scalar>(pair.x.points, m);
  const Mat<Scalar> pxy = resampling_matrix<Scalar>(pair.x.points, pair.y.points);
  const Mat<Scalar> lb = constraint_disc<Scalar>(cs, pair.x.points);
  auto inf_norm = [](const Mat<Scalar>& a) {
    Scalar best(0);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      Scalar s(0);
      for (Eigen::Index j = 0; j < a.cols(); ++j) s += abs(a(i, j));
      if (s > best) best = s;
    }
    return static_cast<double>(best);
  };

  const Mat<Scalar> dmb = dxx * b.B_full;
  Mat<Scalar> full(L, L);
  full.topRows(K) = pxy * dmb;
  full.bottomRows(m) = lb * b.B_full;
  TheoremResiduals r;
  r.full = inf_norm(Mat<Scalar>(full - Mat<Scalar>::Identity(L, L)));

  Mat<Scalar> expect_d = Mat<Scalar>::Zero(L, L);
  expect_d.leftCols(K) = resampling_matrix<Scalar>(pair.y.points, pair.x.points);
  r.derivative = inf_norm(Mat<Scalar>(dmb - expect_d));
  Mat<Scalar> expect_c = Mat<Scalar>::Zero(m, L);
  expect_c.rightCols(m) = Mat<Scalar>::Identity(m, m);
  r.constraint = inf_norm(Mat<Scalar>(full.bottomRows(m) - expect_c));
  return r;
}

// ---------------------------------------------------------------------------
// Problem-level collocation (double)

struct CollocationSystem {
  MatrixXd A;  // [A_{M+1}; L_B]
  VectorXd g;  // [f(y); b]
};

/// Unpreconditioned rectangular collocation system.
CollocationSystem assemble_collocation(const OdeProblem& problem, const PointPair<double>& pair);

/// I + sum_k diag(a^k(y)) Btilde_k and f - sum_k diag(a^k(y)) Bhat_k b.
struct PreconditionedSystem {
  MatrixXd A;
  VectorXd rhs;
};
PreconditionedSystem assemble_preconditioned(const OdeProblem& problem, const PointPair<double>& pair,
                                             const PsimBundle<double>& bundle);

/// The preconditioned operator applied without forming it: O(M log M + M d) per product.
class CollocationOperator {
 public:
  CollocationOperator(const OdeProblem& problem, int M);

  Index size() const { return K_; }
  VectorXd apply(const VectorXd& v) const;
  /// f - sum_k diag(a^k(y)) Bhat_k b.
  VectorXd rhs() const;
  /// Chebyshev coefficients (length N + 1) of u = B_full [v; b].
  VectorXd solution_coeffs(const VectorXd& v) const;

 private:
  /// Coefficients of the v-part of u^{(k)}: Q^{m-k} c - X^{(k)} G c.
  VectorXd derivative_part(const VectorXd& c, int k) const;
  /// Values at the Gauss points of a series of length up to K + m.
  VectorXd eval_y(VectorXd coeffs) const;

  int m_;
  Index K_;
  VectorXd targets_;
  Grid<double> y_;
  MatrixXd brows_after_q_;  // m x K, B Q^m restricted to degree < K
  Eigen::PartialPivLU<MatrixXd> bx_lu_;
  MatrixXd bx_inv_;
  std::vector<std::optional<VectorXd>> coeff_vals_;  // a^k at y
  VectorXd f_vals_;
};

struct CollocationOptions {
  int M = 64;
  /// Dense PSIM + LU up to this M, matrix-free Bi-CGSTAB above.
  int dense_limit = 1024;
  bool compute_cond = false;
  double iter_tol = 1e-14;
  int max_iter = 0;  // 0: 10 (M + 1)
};

struct CollocationSolution {
  PointPair<double> pair;
  VectorXd u;  // at x
  VectorXd v;  // u^{(m)} at y
  SolveDiagnostics diag;
  /// Chebyshev coefficients of the degree-N interpolant of u.
  ChebSeries<double> u_series() const { return ChebSeries<double>(vals_to_coeffs<double>(u)); }
};

CollocationSolution precondition_solve(const OdeProblem& problem, const CollocationOptions& opts);

/// Values of a Chebyshev series on a grid (FFT when the series fits the grid, Clenshaw otherwise).
VectorXd values_on(const ChebSeries<double>& s, const Grid<double>& g);

}  // namespace specsolve
