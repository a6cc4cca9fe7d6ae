#include "specsolve/integral_reform.hpp"

namespace specsolve {

MatrixXd constraint_rows_after_integration(const OdeProblem& problem, Index n) {
  MatrixXd out(problem.order, n);
  for (int i = 0; i < problem.order; ++i)
    out.row(i) = problem.constraints[i].row_after_integration<double>(problem.order, n).transpose();
  return out;
}

VectorXd cs_rhs(const OdeProblem& problem, Index n, const MonomialBlock& block) {
  VectorXd rhs = problem.rhs.padded(n);
  rhs -= block.A_blk * block.solve(problem.targets);
  return rhs;
}

CsSystem assemble_cs(const OdeProblem& problem, Index n) {
  problem.validate();
  const int m = problem.order;
  const Index d = problem.coefficient_degree();
  if (n < m + 1) throw Error(ErrorKind::InvalidTruncation, "assemble_cs: n must exceed the order");
  CsSystem sys;
  sys.block = build_monomial_block(problem, n);

  const Index band = d + m;
  AlmostBandedMatrix mat = AlmostBandedMatrix::identity(n).restructured(band, band, std::min(n, band));
  const Index p = n + m;
  for (int k = 0; k < m; ++k) {
    if (!problem.has_coefficient(k)) continue;
    const OperatorTruncation term =
        compose(mult_op_cheb(problem.coeffs[k], p), integration_power(m - k, p)).cropped(n, n);
    mat = mat + term.matrix;
  }
  // rank-m correction: only rows where A_blk is nonzero, all inside the dense block
  const MatrixXd g = sys.block.BX_lu.solve(constraint_rows_after_integration(problem, n));
  for (Index i = 0; i < n; ++i) {
    if (sys.block.A_blk.row(i).isZero(0.0)) continue;
    const VectorXd corr = (sys.block.A_blk.row(i) * g).transpose();
    for (Index j = 0; j < n; ++j) mat.add(i, j, -corr[j]);
  }
  sys.matrix = std::move(mat);
  sys.rhs = cs_rhs(problem, n, sys.block);
  return sys;
}

FastOperator cs_fast_operator(const OdeProblem& problem, Index n) {
  problem.validate();
  const int m = problem.order;
  const MonomialBlock block = build_monomial_block(problem, n);
  FastOperator op(n, n);
  op.add_term(FastTerm{});  // identity
  for (int k = 0; k < m; ++k) {
    if (!problem.has_coefficient(k)) continue;
    const int s = m - k;
    FastTerm t;
    t.middle = ToeplitzHankel::chebyshev_multiplication(problem.coeffs[k], n, n + s);
    t.right = integration_power(s, n + s).matrix.cropped(n + s, n);
    op.add_term(std::move(t));
  }
  MatrixXd u = -block.A_blk * block.BX_lu.inverse();
  op.set_low_rank(std::move(u), constraint_rows_after_integration(problem, n));
  return op;
}

ChebSeries<double> recover_u(const VectorXd& v, const OdeProblem& problem, const MonomialBlock& block) {
  const int m = problem.order;
  VectorXd u = integrate_coeffs<double>(v, m);
  const Index len = u.size();
  VectorXd bq(m);
  for (int i = 0; i < m; ++i) bq[i] = problem.constraints[i].row<double>(len).dot(u);
  const VectorXd alpha = block.solve(problem.targets - bq);
  for (int j = 0; j < m; ++j) u.head(j + 1) += alpha[j] * monomial_coeffs<double>(j, j + 1);
  return ChebSeries<double>(std::move(u));
}

ChebSeries<double> recover_u(const VectorXd& v, const OdeProblem& problem) {
  return recover_u(v, problem, build_monomial_block(problem, std::max<Index>(v.size(), problem.order)));
}

Index default_start_size(const OdeProblem& problem) {
  return std::max<Index>(32, 2 * (problem.coefficient_degree() + problem.order));
}

namespace {

LinearBackend pick_backend(const OdeProblem& problem, LinearBackend requested) {
  if (requested != LinearBackend::Auto) return requested;
  return problem.coefficient_degree() + problem.order >= kIterativeBandwidth ? LinearBackend::Iterative
                                                                              : LinearBackend::AlmostBandedQR;
}

struct Attempt {
  LinearSolveResult res;
  MonomialBlock block;
};

Attempt solve_at(const OdeProblem& problem, Index n, LinearBackend backend, const CsOptions& opts) {
  Attempt at;
  if (backend == LinearBackend::Iterative) {
    const FastOperator op = cs_fast_operator(problem, n);
    at.block = build_monomial_block(problem, n);
    const VectorXd rhs = cs_rhs(problem, n, at.block);
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * n);
    at.res = bicgstab_solve([&](const VectorXd& x) { return op.apply(x); }, rhs, opts.iter_tol, max_iter);
    return at;
  }
  CsSystem sys = assemble_cs(problem, n);
  at.block = std::move(sys.block);
  if (backend == LinearBackend::DenseQR) {
    const MatrixXd a = sys.matrix.to_dense();
    at.res.x = dense_qr_solve(a, sys.rhs);
    at.res.diag.method = SolveMethod::DenseQR;
    at.res.diag.n_used = n;
    at.res.diag.residual_inf = (a * at.res.x - sys.rhs).lpNorm<Eigen::Infinity>();
  } else {
    at.res = almost_banded_qr_solve(sys.matrix, sys.rhs);
  }
  if (opts.compute_cond && n <= 2048) at.res.diag.cond2 = cond2_estimate(sys.matrix.to_dense());
  return at;
}

}  // namespace

CsSolution solve_cs(const OdeProblem& problem, const CsOptions& opts) {
  problem.validate();
  const LinearBackend backend = pick_backend(problem, opts.backend);
  Attempt at;
  if (opts.n && !opts.adaptive) {
    at = solve_at(problem, *opts.n, backend, opts);
  } else {
    const Index n0 = opts.n ? *opts.n : default_start_size(problem);
    bool done = false;
    for (Index n = n0; n <= opts.n_max; n *= 2) {
      at = solve_at(problem, n, backend, opts);
      if (tail_converged(at.res.x, opts.tail_tol)) {
        done = true;
        break;
      }
    }
    if (!done)
      throw Error(ErrorKind::ResolutionFailure,
                  "solve_cs: solution tail not resolved by n_max = " + std::to_string(opts.n_max));
  }
  CsSolution sol;
  sol.u = recover_u(at.res.x, problem, at.block);
  sol.v = ChebSeries<double>(at.res.x);
  sol.diag = at.res.diag;
  return sol;
}

}  // namespace specsolve
