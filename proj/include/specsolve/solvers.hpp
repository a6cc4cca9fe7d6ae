#pragma once

#include <functional>
#include <optional>
#include <string>

#include "specsolve/almost_banded.hpp"

namespace specsolve {

enum class SolveMethod { DenseQR, DenseLU, AlmostBandedQR, BiCGSTAB };
std::string to_string(SolveMethod m);

struct SolveDiagnostics {
  Index n_used = 0;
  SolveMethod method = SolveMethod::DenseQR;
  int iterations = 0;
  double residual_inf = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> cond2;
  bool converged = true;
  double recursive_residual = std::numeric_limits<double>::quiet_NaN();  // Bi-CGSTAB's own ||r||_2 / ||b||_2

  /// "key: value" lines.
  std::string to_text() const;
};

/// Column-pivoted Householder QR; singular-system when |R_ii| <= eps * ||A|| * n.
VectorXd dense_qr_solve(const MatrixXd& a, const VectorXd& b);

struct LinearSolveResult {
  VectorXd x;
  SolveDiagnostics diag;
};

/// Givens QR on the almost-banded structure, no pivoting.  Work is
/// O(n (L + u + r)^2) with L = max(lower, dense_rows).
LinearSolveResult almost_banded_qr_solve(const AlmostBandedMatrix& a, const VectorXd& b);

/// True when the trailing `window` entries are below tol * ||x||_inf.
bool tail_converged(const VectorXd& x, double tol, Index window = 8);

struct AdaptiveSchedule {
  Index n0 = 32;
  Index n_max = Index(1) << 17;
  double tail_tol = 1e-14;
};

/// Calls solve_at(n) for n = n0, 2 n0, ... until the returned vector's tail is
/// negligible; resolution-failure beyond n_max.
LinearSolveResult adaptive_solve(const std::function<LinearSolveResult(Index)>& solve_at, const AdaptiveSchedule& s);

using LinearMap = std::function<VectorXd(const VectorXd&)>;

/// Unpreconditioned Bi-CGSTAB from x0 = 0, stopping when ||r||_2 <= tol ||b||_2.
/// Breakdown throws solver-breakdown, exhausting max_iter throws solver-failure.
LinearSolveResult bicgstab_solve(const LinearMap& matvec, const VectorXd& b, double tol, int max_iter);
/// Same iteration, but reports non-convergence in the diagnostics instead of throwing.
LinearSolveResult bicgstab_try(const LinearMap& matvec, const VectorXd& b, double tol, int max_iter);

/// sigma_max / sigma_min: singular values for n <= 2048, Lanczos on A^T A and
/// (A^T A)^{-1} above that.  +inf when A is singular.
double cond2_estimate(const MatrixXd& a);
double cond2_svd(const MatrixXd& a);
double cond2_lanczos(const MatrixXd& a, double rel_tol = 1e-10, int max_iter = 300);

}  // namespace specsolve
