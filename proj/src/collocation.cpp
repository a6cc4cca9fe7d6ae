#include "specsolve/collocation.hpp"

namespace specsolve {

VectorXd values_on(const ChebSeries<double>& s, const Grid<double>& g) {
  if (s.size() <= g.size()) return coeffs_to_vals(s, g);
  VectorXd out(g.size());
  for (Index i = 0; i < g.size(); ++i) out[i] = clenshaw_unchecked(s, g.points[i]);
  return out;
}

CollocationSystem assemble_collocation(const OdeProblem& problem, const PointPair<double>& pair) {
  problem.validate();
  const int m = problem.order;
  if (pair.m != m) throw Error(ErrorKind::InvalidArgument, "assemble_collocation: grid pair built for another order");
  const Index K = pair.M() + 1, L = pair.N() + 1;
  const MatrixXd pxy = resampling_matrix<double>(pair.x.points, pair.y.points);
  const MatrixXd d1 = diff_matrix<double>(pair.x.points, 1);

  MatrixXd top = MatrixXd::Zero(K, L);
  MatrixXd dk = MatrixXd::Identity(L, L);
  for (int k = 0; k <= m; ++k) {
    if (k > 0) dk = (dk * d1).eval();
    if (k == m) {
      top += pxy * dk;
    } else if (problem.has_coefficient(k)) {
      const VectorXd a = values_on(problem.coeffs[k], pair.y);
      top += a.asDiagonal() * (pxy * dk);
    }
  }
  CollocationSystem sys;
  sys.A.resize(L, L);
  sys.A.topRows(K) = top;
  sys.A.bottomRows(m) = constraint_disc<double>(problem.constraints, pair.x.points);
  sys.g.resize(L);
  sys.g.head(K) = values_on(problem.rhs, pair.y);
  sys.g.tail(m) = problem.targets;
  return sys;
}

PreconditionedSystem assemble_preconditioned(const OdeProblem& problem, const PointPair<double>& pair,
                                             const PsimBundle<double>& bundle) {
  const int m = problem.order;
  const Index K = pair.M() + 1;
  PreconditionedSystem out;
  out.A = MatrixXd::Identity(K, K);
  out.rhs = values_on(problem.rhs, pair.y);
  for (int k = 0; k < m; ++k) {
    if (!problem.has_coefficient(k)) continue;
    const VectorXd a = values_on(problem.coeffs[k], pair.y);
    out.A += a.asDiagonal() * bundle.Btilde[k];
    out.rhs -= a.cwiseProduct(bundle.Bhat[k] * problem.targets);
  }
  return out;
}

CollocationOperator::CollocationOperator(const OdeProblem& problem, int M)
    : m_(problem.order), K_(M + 1), targets_(problem.targets) {
  problem.validate();
  if (M + 1 < m_) throw Error(ErrorKind::InvalidArgument, "CollocationOperator: M + 1 must be at least m");
  y_ = make_point_pair<double>(M, m_).y;
  brows_after_q_.resize(m_, K_);
  for (int i = 0; i < m_; ++i) brows_after_q_.row(i) = problem.constraints[i].row_after_integration(m_, K_).transpose();
  const MatrixXd bx = constraint_monomial_matrix<double>(problem.constraints);
  bx_lu_.compute(bx);
  bx_inv_ = bx_lu_.inverse();
  if (!bx_inv_.allFinite()) throw Error(ErrorKind::IllPosedConstraints, "CollocationOperator: singular constraint block");
  coeff_vals_.resize(static_cast<std::size_t>(m_));
  for (int k = 0; k < m_; ++k)
    if (problem.has_coefficient(k)) coeff_vals_[static_cast<std::size_t>(k)] = values_on(problem.coeffs[k], y_);
  f_vals_ = values_on(problem.rhs, y_);
}

VectorXd CollocationOperator::eval_y(VectorXd coeffs) const {
  // on the K Gauss points T_{K+r} = -T_{K-r} and T_K = 0
  VectorXd folded = VectorXd::Zero(K_);
  const Index len = coeffs.size();
  folded.head(std::min(len, K_)) = coeffs.head(std::min(len, K_));
  for (Index r = 1; K_ + r < len; ++r) folded[K_ - r] -= coeffs[K_ + r];
  return coeffs_to_vals(ChebSeries<double>(folded), y_);
}

VectorXd CollocationOperator::derivative_part(const VectorXd& c, int k) const {
  VectorXd d = integrate_coeffs<double>(c, m_ - k);
  const VectorXd gc = bx_lu_.solve(VectorXd(brows_after_q_ * c));
  for (int j = k; j < m_; ++j) d.head(j - k + 1) -= gc[j] * detail::monomial_derivative_coeffs<double>(j, k, j - k + 1);
  return d;
}

VectorXd CollocationOperator::apply(const VectorXd& v) const {
  const VectorXd c = gauss_vals_to_coeffs<double>(v);
  VectorXd out = v;
  for (int k = 0; k < m_; ++k) {
    const auto& a = coeff_vals_[static_cast<std::size_t>(k)];
    if (!a) continue;
    out += a->cwiseProduct(eval_y(derivative_part(c, k)));
  }
  return out;
}

VectorXd CollocationOperator::rhs() const {
  VectorXd out = f_vals_;
  const VectorXd alpha = bx_inv_ * targets_;
  for (int k = 0; k < m_; ++k) {
    const auto& a = coeff_vals_[static_cast<std::size_t>(k)];
    if (!a) continue;
    VectorXd p = VectorXd::Zero(m_);
    for (int j = k; j < m_; ++j) p.head(j - k + 1) += alpha[j] * detail::monomial_derivative_coeffs<double>(j, k, j - k + 1);
    out -= a->cwiseProduct(eval_y(p));
  }
  return out;
}

VectorXd CollocationOperator::solution_coeffs(const VectorXd& v) const {
  const VectorXd c = gauss_vals_to_coeffs<double>(v);
  VectorXd u = derivative_part(c, 0);
  const VectorXd alpha = bx_inv_ * targets_;
  for (int j = 0; j < m_; ++j) u.head(j + 1) += alpha[j] * monomial_coeffs<double>(j, j + 1);
  return u;
}

CollocationSolution precondition_solve(const OdeProblem& problem, const CollocationOptions& opts) {
  problem.validate();
  const int m = problem.order;
  CollocationSolution sol;
  sol.pair = make_point_pair<double>(opts.M, m);
  const Index K = opts.M + 1;
  sol.diag.n_used = K;
  if (opts.M <= opts.dense_limit) {
    const PsimBundle<double> bundle = birkhoff_psim<double>(sol.pair, problem.constraints);
    const PreconditionedSystem sys = assemble_preconditioned(problem, sol.pair, bundle);
    Eigen::PartialPivLU<MatrixXd> lu(sys.A);
    sol.v = lu.solve(sys.rhs);
    sol.diag.method = SolveMethod::DenseLU;
    sol.diag.residual_inf = (sys.A * sol.v - sys.rhs).lpNorm<Eigen::Infinity>();
    if (opts.compute_cond) sol.diag.cond2 = cond2_estimate(sys.A);
    VectorXd vb(K + m);
    vb << sol.v, problem.targets;
    sol.u = bundle.B_full * vb;
    return sol;
  }
  const CollocationOperator op(problem, opts.M);
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * K);
  LinearSolveResult res =
      bicgstab_solve([&](const VectorXd& x) { return op.apply(x); }, op.rhs(), opts.iter_tol, max_iter);
  sol.v = std::move(res.x);
  sol.diag = res.diag;
  sol.diag.n_used = K;
  sol.u = coeffs_to_vals(ChebSeries<double>(op.solution_coeffs(sol.v)), sol.pair.x);
  return sol;
}

}  // namespace specsolve
