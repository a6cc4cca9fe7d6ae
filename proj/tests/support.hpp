#pragma once

// Small problems with known solutions shared by the solver-level tests.

#include <cmath>
#include <functional>

#include "specsolve/problem.hpp"

namespace testing_support {

using specsolve::ChebSeries;
using specsolve::ConstraintFunctional;
using specsolve::OdeProblem;
using specsolve::VectorXd;

inline ChebSeries<double> cheb(const std::function<double(double)>& f) { return specsolve::adaptive_approx(f, 1e-15); }

inline ChebSeries<double> poly(std::initializer_list<double> c) {
  VectorXd v(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double x : c) v[i++] = x;
  return ChebSeries<double>(v);
}

struct Manufactured {
  OdeProblem problem;
  std::function<double(double)> u;
};

// u' + x^3 u = f with u = exp(sin 3x), u(-1) given
inline Manufactured first_order() {
  Manufactured p;
  p.u = [](double x) { return std::exp(std::sin(3 * x)); };
  p.problem.order = 1;
  p.problem.coeffs = {poly({0, 0.75, 0, 0.25})};
  p.problem.rhs = cheb([](double x) { return (3 * std::cos(3 * x) + x * x * x) * std::exp(std::sin(3 * x)); });
  p.problem.constraints = {ConstraintFunctional::dirichlet(-1)};
  p.problem.targets = VectorXd::Constant(1, p.u(-1));
  return p;
}

// u'' + x u' + cos(x) u = f with u = sin 2x + x, Dirichlet at both ends
inline Manufactured second_order() {
  Manufactured p;
  p.u = [](double x) { return std::sin(2 * x) + x; };
  p.problem.order = 2;
  p.problem.coeffs = {cheb([](double x) { return std::cos(x); }), poly({0, 1})};
  p.problem.rhs = cheb([](double x) {
    return -4 * std::sin(2 * x) + x * (2 * std::cos(2 * x) + 1) + std::cos(x) * (std::sin(2 * x) + x);
  });
  p.problem.constraints = {ConstraintFunctional::dirichlet(-1), ConstraintFunctional::dirichlet(1)};
  p.problem.targets = VectorXd(2);
  p.problem.targets << p.u(-1), p.u(1);
  return p;
}

// u'' - u = f with u = cosh(2x) + x^3, Neumann at 1 and a mean constraint
inline Manufactured mixed_constraints() {
  Manufactured p;
  p.u = [](double x) { return std::cosh(2 * x) + x * x * x; };
  p.problem.order = 2;
  p.problem.coeffs = {poly({-1})};
  p.problem.rhs = cheb([](double x) { return 3 * std::cosh(2 * x) + 6 * x - x * x * x; });
  p.problem.constraints = {ConstraintFunctional::neumann(1), ConstraintFunctional::integral()};
  p.problem.targets = VectorXd(2);
  p.problem.targets << 2 * std::sinh(2.0) + 3, std::sinh(2.0);
  return p;
}

// u'''' + x^2 u = (1 + x^2) e^x with u = e^x, values and slopes at both ends
inline Manufactured fourth_order() {
  Manufactured p;
  p.u = [](double x) { return std::exp(x); };
  p.problem.order = 4;
  p.problem.coeffs = {poly({0.5, 0, 0.5})};
  p.problem.rhs = cheb([](double x) { return (1 + x * x) * std::exp(x); });
  p.problem.constraints = {ConstraintFunctional::dirichlet(-1), ConstraintFunctional::dirichlet(1),
                           ConstraintFunctional::neumann(-1), ConstraintFunctional::neumann(1)};
  p.problem.targets = VectorXd(4);
  const double em = std::exp(-1.0), ep = std::exp(1.0);
  p.problem.targets << em, ep, em, ep;
  return p;
}

// The operator of the oscillatory first-order example; the right-hand side is
// replaced by something cheap since only the matrix matters for conditioning.
inline OdeProblem cubic_coefficient_operator() {
  OdeProblem p;
  p.order = 1;
  p.coeffs = {poly({0, 0.75, 0, 0.25})};
  p.rhs = poly({1});
  p.constraints = {ConstraintFunctional::dirichlet(-1)};
  p.targets = VectorXd::Zero(1);
  return p;
}

// The tenth-order example with its homogeneous right-hand side.
inline OdeProblem tenth_order_example() {
  OdeProblem p;
  p.order = 10;
  p.coeffs.assign(10, ChebSeries<double>());
  p.coeffs[8] = cheb([](double x) { return std::cosh(x); });
  p.coeffs[6] = poly({0.5, 0, 0.5});
  p.coeffs[4] = poly({0.375, 0, 0.5, 0, 0.125});
  p.coeffs[2] = cheb([](double x) { return std::cos(x); });
  p.coeffs[0] = poly({0.5, 0, 0.5});
  p.rhs = poly({0});
  using CF = ConstraintFunctional;
  p.constraints = {CF::dirichlet(-1), CF::dirichlet(1), CF::neumann(-1), CF::neumann(1)};
  for (int k = 2; k <= 4; ++k) {
    p.constraints.push_back(CF::derivative(k, -1));
    p.constraints.push_back(CF::derivative(k, 1));
  }
  p.targets = VectorXd::Zero(10);
  p.targets[2] = p.targets[3] = 1.0;
  return p;
}

inline double max_error(const ChebSeries<double>& s, const std::function<double(double)>& u) {
  double e = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double x = -1.0 + i / 100.0;
    e = std::max(e, std::abs(specsolve::clenshaw_eval(s, x) - u(x)));
  }
  return e;
}

}  // namespace testing_support
