#pragma once

// The ODE model u^(m) + sum_k a^k u^(k) = f with m linear constraint
// functionals, plus the monomial blocks X and A_blk used by the integral
// reformulation.

#include <string>
#include <vector>

#include "specsolve/cheb.hpp"
#include "specsolve/operators.hpp"

namespace specsolve {

/// A linear functional on Chebyshev coefficient sequences: a point value of
/// some derivative, the integral over [-1, 1], or a weighted sum of those.
struct ConstraintFunctional {
  enum class Kind { PointEval, Integral, Combination };
  Kind kind = Kind::PointEval;
  double x0 = 0.0;
  int order = 0;  // derivative order q for PointEval
  std::vector<double> weights;               // Combination only
  std::vector<ConstraintFunctional> parts;   // Combination only, none of them combinations

  static ConstraintFunctional dirichlet(double x) { return {Kind::PointEval, x, 0, {}, {}}; }
  static ConstraintFunctional neumann(double x) { return {Kind::PointEval, x, 1, {}, {}}; }
  static ConstraintFunctional derivative(int q, double x) { return {Kind::PointEval, x, q, {}, {}}; }
  static ConstraintFunctional integral() { return {Kind::Integral, 0.0, 0, {}, {}}; }
  static ConstraintFunctional combination(std::vector<double> w, std::vector<ConstraintFunctional> f);

  bool operator==(const ConstraintFunctional&) const = default;
  std::string describe() const;

  /// Coefficient-space row of length n: entry j is the functional applied to T_j.
  template <class Scalar = double>
  Vec<Scalar> row(Eigen::Index n) const;

  /// Row of length n for v -> functional(Q^power v), computed without truncation error.
  template <class Scalar = double>
  Vec<Scalar> row_after_integration(int power, Eigen::Index n) const;
};

/// r -> r Q with r of length L, returning length L - 1 (exact: Q's columns < L-1 live in rows < L).
template <class Scalar>
Vec<Scalar> row_times_integration(const Vec<Scalar>& r) {
  const Eigen::Index len = r.size();
  Vec<Scalar> out = Vec<Scalar>::Zero(std::max<Eigen::Index>(len - 1, 0));
  for (Eigen::Index j = 0; j + 1 < len; ++j) {
    Scalar acc = r[0] * integration_entry<Scalar>(0, j);
    for (Eigen::Index i = std::max<Eigen::Index>(1, j - 1); i <= j + 1; ++i) acc += r[i] * integration_entry<Scalar>(i, j);
    out[j] = acc;
  }
  return out;
}

template <class Scalar>
Vec<Scalar> ConstraintFunctional::row(Eigen::Index n) const {
  using std::cos;
  using std::acos;
  if (kind == Kind::Combination) {
    Vec<Scalar> r = Vec<Scalar>::Zero(n);
    for (std::size_t i = 0; i < parts.size(); ++i) r += Scalar(weights[i]) * parts[i].template row<Scalar>(n);
    return r;
  }
  if (kind == Kind::Integral) return integral_functional_row<Scalar>(n);
  const Scalar x(x0);
  Vec<Scalar> r = Vec<Scalar>::Zero(n);
  if (order == 0) {
    if (n > 0) r[0] = Scalar(1);
    if (n > 1) r[1] = x;
    for (Eigen::Index j = 2; j < n; ++j) r[j] = Scalar(2) * x * r[j - 1] - r[j - 2];
    return r;
  }
  // T_j^(q) = 2^{q-1} (q-1)! j C^{(q)}_{j-q}
  Scalar scale = Scalar(1);
  for (int i = 1; i < order; ++i) scale *= Scalar(2 * i);
  if (n <= order) return r;
  const Vec<Scalar> c = ultraspherical_values<Scalar>(order, x, n - order);
  for (Eigen::Index j = order; j < n; ++j) r[j] = scale * Scalar(j) * c[j - order];
  return r;
}

template <class Scalar>
Vec<Scalar> ConstraintFunctional::row_after_integration(int power, Eigen::Index n) const {
  if (kind == Kind::Combination) {
    Vec<Scalar> r = Vec<Scalar>::Zero(n);
    for (std::size_t i = 0; i < parts.size(); ++i)
      r += Scalar(weights[i]) * parts[i].template row_after_integration<Scalar>(power, n);
    return r;
  }
  if (kind == Kind::PointEval && order > power) {
    ConstraintFunctional lowered = *this;
    lowered.order = order - power;
    return lowered.row<Scalar>(n);
  }
  // derivatives of order q undo q of the integrations exactly
  const int p = kind == Kind::PointEval ? power - order : power;
  ConstraintFunctional base = *this;
  base.order = 0;
  Vec<Scalar> r = base.row<Scalar>(n + p);
  for (int i = 0; i < p; ++i) r = row_times_integration<Scalar>(r);
  return r;
}

/// Chebyshev coefficients of the product of two T-series (length la + lb - 1).
template <class Scalar>
Vec<Scalar> cheb_product(const Vec<Scalar>& a, const Vec<Scalar>& b) {
  const Eigen::Index la = a.size(), lb = b.size();
  Vec<Scalar> out = Vec<Scalar>::Zero(la + lb - 1);
  for (Eigen::Index i = 0; i < la; ++i) {
    if (a[i] == Scalar(0)) continue;
    for (Eigen::Index j = 0; j < lb; ++j) {
      const Scalar h = a[i] * b[j] / Scalar(2);
      out[i + j] += h;
      out[i > j ? i - j : j - i] += h;
    }
  }
  return out;
}

struct OdeProblem {
  int order = 1;
  std::vector<ChebSeries<double>> coeffs;  // a^0 .. a^{m-1}
  ChebSeries<double> rhs;
  std::vector<ConstraintFunctional> constraints;
  VectorXd targets;

  /// Throws invalid-argument on inconsistent sizes or non-Chebyshev series.
  void validate() const;
  /// Largest degree among the nonzero coefficients (0 if all vanish).
  Index coefficient_degree() const;
  bool has_coefficient(int k) const { return k < static_cast<int>(coeffs.size()) && !coeffs[k].trimmed().is_zero(); }
  /// m x n block of constraint rows.
  MatrixXd constraint_rows(Index n) const;
};

struct MonomialBlock {
  MatrixXd X;      // column j: coefficients of x^j
  MatrixXd A_blk;  // column j: coefficients of sum_k a^k d^k/dx^k x^j
  MatrixXd BX;     // constraints applied to X
  Eigen::PartialPivLU<MatrixXd> BX_lu;
  double BX_cond = 1.0;

  /// (BX)^{-1} y
  VectorXd solve(const VectorXd& y) const { return BX_lu.solve(y); }
};

/// X and A_blk truncated to n rows (A_blk keeps every coefficient when n is large enough).
MonomialBlock build_monomial_block(const OdeProblem& problem, Index n);

}  // namespace specsolve
