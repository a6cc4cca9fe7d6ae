#include "specsolve/problem.hpp"

#include <sstream>

namespace specsolve {

ConstraintFunctional ConstraintFunctional::combination(std::vector<double> w, std::vector<ConstraintFunctional> f) {
  if (w.size() != f.size() || f.empty())
    throw Error(ErrorKind::InvalidArgument, "combination: need one weight per functional");
  for (const auto& part : f)
    if (part.kind == Kind::Combination) throw Error(ErrorKind::InvalidArgument, "combination: nested combinations");
  ConstraintFunctional c;
  c.kind = Kind::Combination;
  c.weights = std::move(w);
  c.parts = std::move(f);
  return c;
}

std::string ConstraintFunctional::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::Combination) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) os << " + ";
      os << weights[i] << "*" << parts[i].describe();
    }
    return os.str();
  }
  if (kind == Kind::Integral) return "integral";
  if (order == 0)
    os << "dirichlet(" << x0 << ")";
  else if (order == 1)
    os << "neumann(" << x0 << ")";
  else
    os << "deriv(" << order << ", " << x0 << ")";
  return os.str();
}

void OdeProblem::validate() const {
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "problem order must be >= 1");
  if (static_cast<int>(coeffs.size()) > order)
    throw Error(ErrorKind::InvalidArgument, "more coefficient functions than the order allows");
  if (static_cast<int>(constraints.size()) != order)
    throw Error(ErrorKind::InvalidArgument, "need exactly " + std::to_string(order) + " constraints, got " +
                                                std::to_string(constraints.size()));
  if (targets.size() != order) throw Error(ErrorKind::InvalidArgument, "constraint targets must have length m");
  for (const auto& a : coeffs)
    if (a.basis != Basis::chebyshev()) throw Error(ErrorKind::BasisMismatch, "coefficients must be Chebyshev series");
  if (rhs.basis != Basis::chebyshev()) throw Error(ErrorKind::BasisMismatch, "rhs must be a Chebyshev series");
  auto check = [](const ConstraintFunctional& c) {
    if (c.kind == ConstraintFunctional::Kind::PointEval) {
      if (!(std::abs(c.x0) <= 1.0)) throw Error(ErrorKind::DomainError, "constraint point outside [-1, 1]");
      if (c.order < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order in constraint");
    }
  };
  for (const auto& c : constraints) {
    check(c);
    for (const auto& part : c.parts) check(part);
  }
}

Index OdeProblem::coefficient_degree() const {
  Index d = 0;
  for (int k = 0; k < static_cast<int>(coeffs.size()); ++k)
    if (has_coefficient(k)) d = std::max(d, coeffs[k].trimmed().degree());
  return d;
}

MatrixXd OdeProblem::constraint_rows(Index n) const {
  MatrixXd b(order, n);
  for (int i = 0; i < order; ++i) b.row(i) = constraints[i].row<double>(n).transpose();
  return b;
}

MonomialBlock build_monomial_block(const OdeProblem& problem, Index n) {
  const int m = problem.order;
  if (n < m) throw Error(ErrorKind::InvalidTruncation, "monomial block needs n >= m");
  MonomialBlock blk;
  blk.X = MatrixXd::Zero(n, m);
  blk.A_blk = MatrixXd::Zero(n, m);
  for (int j = 0; j < m; ++j) blk.X.col(j) = monomial_coeffs<double>(j, n);

  for (int j = 0; j < m; ++j) {
    for (int k = 0; k <= j && k < m; ++k) {
      if (!problem.has_coefficient(k)) continue;
      // d^k/dx^k x^j = j!/(j-k)! x^{j-k}
      double fac = 1.0;
      for (int t = j - k + 1; t <= j; ++t) fac *= t;
      const VectorXd mono = monomial_coeffs<double>(j - k, j - k + 1);
      const VectorXd prod = cheb_product<double>(problem.coeffs[k].trimmed().coeffs, mono);
      const Index len = std::min(n, prod.size());
      blk.A_blk.col(j).head(len) += fac * prod.head(len);
    }
  }

  // exact rows: the constraint applied to x^j only needs j+1 coefficients
  blk.BX = MatrixXd(m, m);
  for (int i = 0; i < m; ++i) {
    const VectorXd r = problem.constraints[i].row<double>(m);
    for (int j = 0; j < m; ++j) blk.BX(i, j) = r.dot(monomial_coeffs<double>(j, m));
  }
  Eigen::JacobiSVD<MatrixXd> svd(blk.BX);
  const auto& s = svd.singularValues();
  blk.BX_cond = s[s.size() - 1] > 0 ? s[0] / s[s.size() - 1] : std::numeric_limits<double>::infinity();
  if (!(blk.BX_cond < 1e13))
    throw Error(ErrorKind::IllPosedConstraints,
                "constraint matrix BX is singular (cond estimate " + std::to_string(blk.BX_cond) + ")");
  blk.BX_lu = blk.BX.partialPivLu();
  return blk;
}

}  // namespace specsolve
