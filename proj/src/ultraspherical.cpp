#include "specsolve/ultraspherical.hpp"

namespace specsolve {

namespace {

/// Sum of the L terms at padded size p, before cropping; M_0 term optional.
AlmostBandedMatrix us_terms(const OdeProblem& problem, Index p, bool with_m0) {
  const int m = problem.order;
  OperatorTruncation total = diff_op(m, p);
  for (int k = 1; k < m; ++k) {
    if (!problem.has_coefficient(k)) continue;
    const OperatorTruncation term =
        compose(conv_chain(k, m, p), compose(mult_op_ultra(problem.coeffs[k], k, p), diff_op(k, p)));
    total.matrix = total.matrix + term.matrix;
  }
  if (with_m0 && problem.has_coefficient(0)) {
    const OperatorTruncation term = compose(conv_chain(0, m, p), mult_op_cheb(problem.coeffs[0], p));
    total.matrix = total.matrix + term.matrix;
  }
  return total.matrix;
}

}  // namespace

AlmostBandedMatrix us_operator(const OdeProblem& problem, Index n) {
  problem.validate();
  const int m = problem.order;
  if (n <= m) throw Error(ErrorKind::InvalidTruncation, "us_operator: n must exceed the order");
  return us_terms(problem, n + 2 * m, true).cropped(n - m, n);
}

VectorXd us_preconditioner(int m, Index n) {
  VectorXd r(n);
  const double scale = 1.0 / diff_scale(m);
  for (Index j = 0; j < n; ++j) r[j] = j < m ? scale : scale / static_cast<double>(j);
  return r;
}

UsSystem assemble_us(const OdeProblem& problem, Index n) {
  const int m = problem.order;
  const AlmostBandedMatrix l = us_operator(problem, n);
  UsSystem sys;
  sys.order = m;
  sys.A = AlmostBandedMatrix(n, n, l.lower() + m, l.upper(), m);
  const MatrixXd b = problem.constraint_rows(n);
  for (int i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) sys.A.set(i, j, b(i, j));
  for (Index i = 0; i < n - m; ++i)
    for (Index j = l.row_begin(i); j < l.row_end(i); ++j) {
      const double v = l.get(i, j);
      if (v != 0.0) sys.A.set(i + m, j, v);
    }
  const Index p = n + m;
  const VectorXd sf = conv_chain(0, m, p).matrix.matvec(problem.rhs.padded(p));
  sys.rhs.resize(n);
  sys.rhs.head(m) = problem.targets;
  sys.rhs.tail(n - m) = sf.head(n - m);
  sys.R = us_preconditioner(m, n);
  return sys;
}

AlmostBandedMatrix precondition_us(const UsSystem& sys) { return sys.A.scaled_columns(sys.R); }

FastOperator us_fast_operator(const OdeProblem& problem, Index n, bool preconditioned) {
  problem.validate();
  const int m = problem.order;
  if (n <= m) throw Error(ErrorKind::InvalidTruncation, "us_fast_operator: n must exceed the order");
  FastOperator op(n, n);
  RowMatrixXd top = problem.constraint_rows(n);
  op.set_top_rows(std::move(top));
  FastTerm banded;
  banded.left = us_terms(problem, n + 2 * m, false).cropped(n - m, n);
  op.add_term(std::move(banded));
  if (problem.has_coefficient(0)) {
    FastTerm t;
    t.left = conv_chain(0, m, n + m).matrix.cropped(n - m, n + m);
    t.middle = ToeplitzHankel::chebyshev_multiplication(problem.coeffs[0], n + m, n);
    op.add_term(std::move(t));
  }
  if (preconditioned) op.set_column_scaling(us_preconditioner(m, n));
  return op;
}

VectorXd us_rhs(const OdeProblem& problem, Index n) {
  const int m = problem.order;
  const Index p = n + m;
  VectorXd rhs(n);
  rhs.head(m) = problem.targets;
  rhs.tail(n - m) = conv_chain(0, m, p).matrix.matvec(problem.rhs.padded(p)).head(n - m);
  return rhs;
}

namespace {

LinearSolveResult us_solve_at(const OdeProblem& problem, Index n, bool precond, LinearBackend backend,
                              const UsOptions& opts) {
  const int m = problem.order;
  LinearSolveResult res;
  if (backend == LinearBackend::Iterative) {
    const FastOperator op = us_fast_operator(problem, n, precond);
    const VectorXd rhs = us_rhs(problem, n);
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * n);
    res = bicgstab_solve([&](const VectorXd& x) { return op.apply(x); }, rhs, opts.iter_tol, max_iter);
    if (precond) res.x = res.x.cwiseProduct(us_preconditioner(m, n));
    return res;
  }
  UsSystem sys = assemble_us(problem, n);
  AlmostBandedMatrix a = precond ? precondition_us(sys) : sys.A;
  // scaling the constraint rows leaves the solution unchanged and keeps
  // high-order derivative rows from dominating the rotations
  VectorXd rhs = sys.rhs;
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j) s = std::max(s, std::abs(a.get(i, j)));
    if (s == 0.0) continue;
    for (Index j = 0; j < n; ++j) a.set(i, j, a.get(i, j) / s);
    rhs[i] /= s;
  }
  if (backend == LinearBackend::DenseQR) {
    const MatrixXd ad = a.to_dense();
    res.x = dense_qr_solve(ad, rhs);
    res.diag.method = SolveMethod::DenseQR;
    res.diag.n_used = n;
  } else {
    res = almost_banded_qr_solve(a, rhs);
  }
  if (precond) res.x = res.x.cwiseProduct(sys.R);
  res.diag.residual_inf = (sys.A.matvec(res.x) - sys.rhs).lpNorm<Eigen::Infinity>();
  if (opts.compute_cond && n <= 2048)
    res.diag.cond2 = cond2_estimate(precond ? precondition_us(sys).to_dense() : sys.A.to_dense());
  return res;
}

}  // namespace

UsSolution solve_us(const OdeProblem& problem, const UsOptions& opts) {
  problem.validate();
  const bool precond = opts.variant == UsVariant::Preconditioned;
  LinearBackend backend = opts.backend;
  if (backend == LinearBackend::Auto)
    backend = problem.coefficient_degree() + problem.order >= kIterativeBandwidth ? LinearBackend::Iterative
                                                                                   : LinearBackend::AlmostBandedQR;
  LinearSolveResult res;
  if (opts.n && !opts.adaptive) {
    res = us_solve_at(problem, *opts.n, precond, backend, opts);
  } else {
    AdaptiveSchedule sched;
    sched.n0 = opts.n ? *opts.n : default_start_size(problem);
    sched.n_max = opts.n_max;
    sched.tail_tol = opts.tail_tol;
    res = adaptive_solve([&](Index n) { return us_solve_at(problem, n, precond, backend, opts); }, sched);
  }
  UsSolution sol;
  sol.u = ChebSeries<double>(res.x);
  sol.diag = res.diag;
  return sol;
}

}  // namespace specsolve
