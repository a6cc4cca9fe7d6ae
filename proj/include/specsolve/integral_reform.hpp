#pragma once

// Chebyshev spectral method for the integral reformulation: solve for
// v = u^(m) from (I + sum_k M_0[a^k] Q^{m-k} - A_blk (BX)^{-1} B Q^m) v = f - A_blk (BX)^{-1} b,
// then recover u = Q^m v + X (BX)^{-1} (b - B Q^m v).

#include <optional>

#include "specsolve/almost_banded.hpp"
#include "specsolve/fast_operator.hpp"
#include "specsolve/problem.hpp"
#include "specsolve/solvers.hpp"

namespace specsolve {

/// B Q^m as an m x n block, each row exact.
MatrixXd constraint_rows_after_integration(const OdeProblem& problem, Index n);

struct CsSystem {
  AlmostBandedMatrix matrix;
  VectorXd rhs;
  MonomialBlock block;
};

/// P_n L~ P_n^T with the rank-m correction folded into the dense top rows.
CsSystem assemble_cs(const OdeProblem& problem, Index n);
/// The same operator as an O(n log n) map with the correction kept low-rank.
FastOperator cs_fast_operator(const OdeProblem& problem, Index n);
/// P_n (f - A_blk (BX)^{-1} b).
VectorXd cs_rhs(const OdeProblem& problem, Index n, const MonomialBlock& block);

/// Coefficients of u (length n + m: the exact m-fold antiderivative of v_n plus the polynomial part).
ChebSeries<double> recover_u(const VectorXd& v, const OdeProblem& problem, const MonomialBlock& block);
ChebSeries<double> recover_u(const VectorXd& v, const OdeProblem& problem);

enum class LinearBackend { Auto, DenseQR, AlmostBandedQR, Iterative };

/// Bandwidth (coefficient degree + m) above which Auto switches to Bi-CGSTAB.
inline constexpr Index kIterativeBandwidth = 256;

struct CsOptions {
  std::optional<Index> n;  // fixed truncation; adaptive when empty or `adaptive` is set
  bool adaptive = false;
  LinearBackend backend = LinearBackend::Auto;
  double tail_tol = 1e-14;
  Index n_max = Index(1) << 17;
  double iter_tol = 1e-14;
  int max_iter = 0;  // 0: 10 n
  bool compute_cond = false;
};

struct CsSolution {
  ChebSeries<double> u;
  ChebSeries<double> v;
  SolveDiagnostics diag;
};

Index default_start_size(const OdeProblem& problem);
CsSolution solve_cs(const OdeProblem& problem, const CsOptions& opts = {});

}  // namespace specsolve
