#include "specsolve/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace specsolve {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::DenseQR: return "dense-qr";
    case SolveMethod::DenseLU: return "dense-lu";
    case SolveMethod::AlmostBandedQR: return "almost-banded-qr";
    case SolveMethod::BiCGSTAB: return "bicgstab";
  }
  return "unknown";
}

std::string SolveDiagnostics::to_text() const {
  std::ostringstream os;
  os.precision(5);
  os << "n_used: " << n_used << "\n";
  os << "method: " << to_string(method) << "\n";
  os << "iterations: " << iterations << "\n";
  os << "converged: " << (converged ? "true" : "false") << "\n";
  os << "residual_inf: " << residual_inf << "\n";
  if (cond2) os << "cond2: " << *cond2 << "\n";
  return os.str();
}

VectorXd dense_qr_solve(const MatrixXd& a, const VectorXd& b) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidArgument, "dense_qr_solve: matrix must be square");
  if (a.rows() != b.size()) throw Error(ErrorKind::InvalidArgument, "dense_qr_solve: size mismatch");
  if (!a.allFinite()) throw Error(ErrorKind::InvalidArgument, "dense_qr_solve: non-finite entries");
  const Index n = a.rows();
  if (n == 0) return VectorXd(0);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  const double norm = a.lpNorm<Eigen::Infinity>();
  const double thresh = std::numeric_limits<double>::epsilon() * norm * static_cast<double>(n);
  const auto& r = qr.matrixQR();
  for (Index i = 0; i < n; ++i)
    if (!(std::abs(r(i, i)) > thresh)) throw Error(ErrorKind::SingularSystem, "dense_qr_solve: rank deficient matrix");
  return qr.solve(b);
}

LinearSolveResult almost_banded_qr_solve(const AlmostBandedMatrix& a, const VectorXd& b) {
  const Index n = a.rows();
  if (a.cols() != n) throw Error(ErrorKind::InvalidArgument, "almost_banded_qr_solve: matrix must be square");
  if (b.size() != n) throw Error(ErrorKind::InvalidArgument, "almost_banded_qr_solve: size mismatch");
  const Index r = a.dense_rows();
  const Index u = a.upper();
  // Dense rows behave like band rows reaching back to column 0.
  const Index lw = std::min(std::max(a.lower(), r), std::max<Index>(n - 1, 0));
  const Index width = 2 * lw + u + 1;  // row i stores columns [i - lw, i + lw + u]

  std::vector<double> win(static_cast<std::size_t>(n * width), 0.0);
  std::vector<double> wts(static_cast<std::size_t>(n * r), 0.0);  // row i beyond its window = wts_i . F
  RowMatrixXd f(r, n);
  auto at = [&](Index i, Index j) -> double& { return win[static_cast<std::size_t>(i * width + (j - i + lw))]; };

  for (Index i = 0; i < n; ++i) {
    const Index hi = std::min(n, i + lw + u + 1);
    for (Index j = std::max<Index>(0, i - lw); j < hi; ++j) at(i, j) = a.get(i, j);
  }
  for (Index t = 0; t < r; ++t) {
    for (Index j = 0; j < n; ++j) f(t, j) = a.get(t, j);
    wts[static_cast<std::size_t>(t * r + t)] = 1.0;
  }
  VectorXd rhs = b;

  auto beyond = [&](Index i, Index j) {
    double acc = 0.0;
    for (Index t = 0; t < r; ++t) acc += wts[static_cast<std::size_t>(i * r + t)] * f(t, j);
    return acc;
  };

  for (Index j = 0; j < n; ++j) {
    const Index last = std::min(n - 1, j + lw);
    for (Index p = last; p > j; --p) {
      const Index q = p - 1;
      const double bv = at(p, j);
      if (bv == 0.0) continue;
      const double av = at(q, j);
      const double rr = std::hypot(av, bv);
      const double c = av / rr, s = bv / rr;
      const Index qend = q + lw + u;  // last explicit column of row q
      const Index pend = std::min(n - 1, p + lw + u);
      for (Index col = j; col <= pend; ++col) {
        const double x = col <= qend ? at(q, col) : beyond(q, col);
        const double y = at(p, col);
        if (col <= qend) at(q, col) = c * x + s * y;
        at(p, col) = -s * x + c * y;
      }
      for (Index t = 0; t < r; ++t) {
        double& wq = wts[static_cast<std::size_t>(q * r + t)];
        double& wp = wts[static_cast<std::size_t>(p * r + t)];
        const double x = wq, y = wp;
        wq = c * x + s * y;
        wp = -s * x + c * y;
      }
      const double x = rhs[q], y = rhs[p];
      rhs[q] = c * x + s * y;
      rhs[p] = -s * x + c * y;
    }
  }

  const double thresh = std::numeric_limits<double>::epsilon() * a.norm_inf() * static_cast<double>(n);
  VectorXd x = VectorXd::Zero(n);
  VectorXd fsum = VectorXd::Zero(r);  // F(:, k) x_k summed over columns beyond the current window
  for (Index i = n - 1; i >= 0; --i) {
    const Index kadd = i + lw + u + 1;
    if (kadd < n && r > 0) fsum += f.col(kadd) * x[kadd];
    double acc = rhs[i];
    const Index hi = std::min(n - 1, i + lw + u);
    for (Index k = i + 1; k <= hi; ++k) acc -= at(i, k) * x[k];
    for (Index t = 0; t < r; ++t) acc -= wts[static_cast<std::size_t>(i * r + t)] * fsum[t];
    const double d = at(i, i);
    if (!(std::abs(d) > thresh)) throw Error(ErrorKind::SingularSystem, "almost_banded_qr_solve: singular matrix");
    x[i] = acc / d;
  }

  LinearSolveResult out;
  out.diag.n_used = n;
  out.diag.method = SolveMethod::AlmostBandedQR;
  out.diag.residual_inf = (a.matvec(x) - b).lpNorm<Eigen::Infinity>();
  out.x = std::move(x);
  return out;
}

bool tail_converged(const VectorXd& x, double tol, Index window) {
  const double xmax = x.lpNorm<Eigen::Infinity>();
  if (xmax == 0.0) return true;
  if (x.size() <= window) return false;
  return x.tail(window).lpNorm<Eigen::Infinity>() <= tol * xmax;
}

LinearSolveResult adaptive_solve(const std::function<LinearSolveResult(Index)>& solve_at, const AdaptiveSchedule& s) {
  for (Index n = s.n0; n <= s.n_max; n *= 2) {
    LinearSolveResult res = solve_at(n);
    if (tail_converged(res.x, s.tail_tol)) return res;
  }
  throw Error(ErrorKind::ResolutionFailure,
              "adaptive solve: tail not resolved by n_max = " + std::to_string(s.n_max));
}

namespace {

LinearSolveResult bicgstab_core(const LinearMap& matvec, const VectorXd& b, double tol, int max_iter, bool strict) {
  const Index n = b.size();
  LinearSolveResult out;
  out.diag.n_used = n;
  out.diag.method = SolveMethod::BiCGSTAB;
  out.x = VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.diag.residual_inf = 0.0;
    out.diag.recursive_residual = 0.0;
    return out;
  }
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  VectorXd r = b, rhat = b, p = VectorXd::Zero(n), v = VectorXd::Zero(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  auto fail = [&](ErrorKind kind, const std::string& msg) {
    if (strict) throw Error(kind, msg);
    out.diag.converged = false;
  };
  bool done = false;
  for (int it = 1; it <= max_iter && !done; ++it) {
    out.diag.iterations = it;
    const double rho_new = rhat.dot(r);
    if (std::abs(rho_new) <= tiny * bnorm) {
      fail(ErrorKind::SolverBreakdown, "bicgstab: rho breakdown");
      break;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    p = r + beta * (p - omega * v);
    v = matvec(p);
    const double rv = rhat.dot(v);
    if (rv == 0.0 || !std::isfinite(rv)) {
      fail(ErrorKind::SolverBreakdown, "bicgstab: <rhat, v> breakdown");
      break;
    }
    alpha = rho_new / rv;
    out.x += alpha * p;
    VectorXd s = r - alpha * v;
    if (s.norm() <= tol * bnorm) {
      r = s;
      done = true;
      break;
    }
    const VectorXd t = matvec(s);
    const double tt = t.squaredNorm();
    if (tt == 0.0) {
      fail(ErrorKind::SolverBreakdown, "bicgstab: t = 0 breakdown");
      break;
    }
    omega = t.dot(s) / tt;
    if (std::abs(omega) <= tiny) {
      fail(ErrorKind::SolverBreakdown, "bicgstab: omega breakdown");
      break;
    }
    out.x += omega * s;
    r = s - omega * t;
    rho = rho_new;
    if (!r.allFinite()) {
      fail(ErrorKind::SolverBreakdown, "bicgstab: non-finite residual");
      break;
    }
    if (r.norm() <= tol * bnorm) done = true;
  }
  out.diag.recursive_residual = r.norm() / bnorm;
  out.diag.residual_inf = (matvec(out.x) - b).lpNorm<Eigen::Infinity>();
  if (!done) {
    if (out.diag.converged) fail(ErrorKind::SolverFailure, "bicgstab: no convergence in " + std::to_string(max_iter) + " iterations");
    out.diag.converged = false;
  }
  return out;
}

/// Largest eigenvalue of a symmetric positive operator by Lanczos with full reorthogonalization.
double lanczos_max(const LinearMap& op, Index n, double rel_tol, int max_iter) {
  const int kmax = static_cast<int>(std::min<Index>(max_iter, n));
  MatrixXd basis(n, kmax);
  VectorXd q(n);
  for (Index i = 0; i < n; ++i) q[i] = 1.0 + 0.5 * std::sin(1.0 + 3.0 * static_cast<double>(i));
  q.normalize();
  std::vector<double> alpha, beta;
  double prev = 0.0;
  int stable = 0;
  for (int k = 0; k < kmax; ++k) {
    basis.col(k) = q;
    VectorXd w = op(q);
    const double a = q.dot(w);
    alpha.push_back(a);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    const double bnext = w.norm();

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      t(i, i) = alpha[i];
      if (i < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t, Eigen::EigenvaluesOnly);
    const double lam = es.eigenvalues().maxCoeff();
    if (k > 0 && std::abs(lam - prev) <= rel_tol * std::abs(lam)) {
      if (++stable >= 3) return lam;
    } else {
      stable = 0;
    }
    prev = lam;
    if (bnext <= 1e-14 * std::abs(lam)) return lam;  // invariant subspace
    beta.push_back(bnext);
    q = w / bnext;
  }
  return prev;
}

}  // namespace

LinearSolveResult bicgstab_solve(const LinearMap& matvec, const VectorXd& b, double tol, int max_iter) {
  return bicgstab_core(matvec, b, tol, max_iter, true);
}

LinearSolveResult bicgstab_try(const LinearMap& matvec, const VectorXd& b, double tol, int max_iter) {
  return bicgstab_core(matvec, b, tol, max_iter, false);
}

double cond2_svd(const MatrixXd& a) {
  Eigen::BDCSVD<MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s[s.size() - 1];
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

double cond2_lanczos(const MatrixXd& a, double rel_tol, int max_iter) {
  const Index n = a.cols();
  Eigen::PartialPivLU<MatrixXd> lu(a);
  const double det_scale = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(det_scale > 0.0)) return std::numeric_limits<double>::infinity();
  const double lmax = lanczos_max([&](const VectorXd& x) { return VectorXd(a.transpose() * (a * x)); }, n, rel_tol, max_iter);
  const double linv =
      lanczos_max([&](const VectorXd& x) { return VectorXd(lu.solve(VectorXd(lu.transpose().solve(x)))); }, n, rel_tol, max_iter);
  if (!std::isfinite(linv) || linv <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(lmax * linv);
}

double cond2_estimate(const MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidArgument, "cond2_estimate: matrix must be square");
  if (a.rows() <= 2048) return cond2_svd(a);
  return cond2_lanczos(a);
}

}  // namespace specsolve
