#pragma once

// Ultraspherical spectral method: A_n = [B P_n^T ; P_{n-m} L P_n^T] with
// L = D_m + sum_{k>=1} S_{m-1}..S_k M_k[a^k] D_k + S_{m-1}..S_0 M_0[a^0],
// and its diagonal right preconditioner R.

#include <optional>

#include "specsolve/fast_operator.hpp"
#include "specsolve/integral_reform.hpp"
#include "specsolve/problem.hpp"
#include "specsolve/solvers.hpp"

namespace specsolve {

struct UsSystem {
  AlmostBandedMatrix A;  // n x n, first m rows are the constraint rows
  VectorXd rhs;          // [b; P_{n-m} S_{m-1}..S_0 f]
  VectorXd R;            // diagonal of the preconditioner
  int order = 1;
};

/// Rows 0..n-m-1 of L, as an (n - m) x n truncation.
AlmostBandedMatrix us_operator(const OdeProblem& problem, Index n);
/// diag(I_m, 1/m, 1/(m+1), ...) / (2^{m-1} (m-1)!)
VectorXd us_preconditioner(int m, Index n);
UsSystem assemble_us(const OdeProblem& problem, Index n);
/// A_n R_n.
AlmostBandedMatrix precondition_us(const UsSystem& sys);
/// Matrix-free A_n (or A_n R_n) with M_0[a^0] applied through FFTs.
FastOperator us_fast_operator(const OdeProblem& problem, Index n, bool preconditioned);
/// [b; P_{n-m} S_{m-1}..S_0 f] without assembling the matrix.
VectorXd us_rhs(const OdeProblem& problem, Index n);

enum class UsVariant { Plain, Preconditioned };

struct UsOptions {
  std::optional<Index> n;
  bool adaptive = false;
  UsVariant variant = UsVariant::Preconditioned;
  LinearBackend backend = LinearBackend::Auto;
  double tail_tol = 1e-14;
  Index n_max = Index(1) << 17;
  double iter_tol = 1e-14;
  int max_iter = 0;  // 0: 10 n
  bool compute_cond = false;
};

struct UsSolution {
  ChebSeries<double> u;
  SolveDiagnostics diag;
};

UsSolution solve_us(const OdeProblem& problem, const UsOptions& opts = {});

}  // namespace specsolve
