#include <doctest.h>

#include <random>

#include "specsolve/ultraspherical.hpp"
#include "support.hpp"

using namespace specsolve;
using namespace testing_support;

namespace {

constexpr double eps = 2.220446049250313e-16;

}  // namespace

TEST_CASE("pure differentiation rows") {
  OdeProblem p;
  p.order = 1;
  p.rhs = poly({0});
  p.constraints = {ConstraintFunctional::dirichlet(-1)};
  p.targets = VectorXd::Zero(1);
  const MatrixXd l = us_operator(p, 8).to_dense();
  REQUIRE(l.rows() == 7);
  for (Index i = 0; i < 7; ++i)
    for (Index j = 0; j < 8; ++j) CHECK(l(i, j) == (j == i + 1 ? static_cast<double>(i + 1) : 0.0));

  const UsSystem sys = assemble_us(p, 8);
  CHECK(sys.A.to_dense().row(0) == ConstraintFunctional::dirichlet(-1).row(8).transpose());
}

TEST_CASE("preconditioner diagonal") {
  const VectorXd r1 = us_preconditioner(1, 5);
  CHECK(r1[0] == 1.0);
  CHECK(r1[1] == 1.0);
  CHECK(r1[2] == doctest::Approx(0.5));
  CHECK(r1[4] == doctest::Approx(0.25));
  // m = 3: diag(I_3, 1/3, 1/4, ...) / 8
  const VectorXd r3 = us_preconditioner(3, 6);
  CHECK(r3[2] == doctest::Approx(1.0 / 8));
  CHECK(r3[3] == doctest::Approx(1.0 / 24));
  CHECK(r3[5] == doctest::Approx(1.0 / 40));
}

TEST_CASE("L applied to monomials is the converted A block") {
  for (const OdeProblem& p : {first_order().problem, second_order().problem, fourth_order().problem, tenth_order_example()}) {
    const int m = p.order;
    const Index n = 80;
    const MatrixXd l = us_operator(p, n).to_dense();
    const MonomialBlock blk = build_monomial_block(p, n + m);
    const MatrixXd lhs = l * blk.X.topRows(n);
    const MatrixXd rhs = conv_chain(0, m, n + m).matrix.to_dense() * blk.A_blk;
    CAPTURE(m);
    CHECK((lhs - rhs.topRows(n - m)).lpNorm<Eigen::Infinity>() <= 1e3 * eps * (1.0 + rhs.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("D_m Q^m reproduces the conversion chain") {
  for (int m = 1; m <= 4; ++m) {
    const Index n = 60;
    const MatrixXd dq = diff_op(m, n + m).matrix.to_dense() * integration_power(m, n + m).matrix.to_dense();
    const MatrixXd s = conv_chain(0, m, n + m).matrix.to_dense();
    CHECK((dq - s).topLeftCorner(n - m, n - m).lpNorm<Eigen::Infinity>() <= 1e3 * eps);
  }
}

TEST_CASE("conditioning of US grows while P-US stays flat") {
  const OdeProblem p = cubic_coefficient_operator();
  const double us128 = cond2_estimate(assemble_us(p, 128).A.to_dense());
  CHECK(us128 == doctest::Approx(240.45).epsilon(0.01));
  double prev = us128, pus_first = 0.0;
  for (Index n : {128, 256, 512}) {
    const UsSystem sys = assemble_us(p, n);
    const double us = cond2_estimate(sys.A.to_dense());
    const double pus = cond2_estimate(precondition_us(sys).to_dense());
    if (n > 128) CHECK(us > prev);
    prev = us;
    if (pus_first == 0.0) pus_first = pus;
    CHECK(pus == doctest::Approx(3.985).epsilon(0.003));
    CHECK(std::abs(pus - pus_first) <= 0.01 * pus_first);
  }
  CHECK(cond2_estimate(assemble_us(p, 256).A.to_dense()) == doctest::Approx(483.12).epsilon(0.01));
}

TEST_CASE("solve_us") {
  OdeProblem triv;
  triv.order = 1;
  triv.rhs = poly({0});
  triv.constraints = {ConstraintFunctional::dirichlet(-1)};
  triv.targets = VectorXd::Constant(1, 3.0);
  UsOptions o;
  o.n = 8;
  CHECK(clenshaw_eval(solve_us(triv, o).u, -0.2) == doctest::Approx(3.0));

  for (const auto& mp : {first_order(), second_order(), mixed_constraints(), fourth_order()}) {
    const OdeProblem& p = mp.problem;
    CAPTURE(p.order);
    const auto pus = solve_us(p);
    CHECK(max_error(pus.u, mp.u) <= 1e-12);

    UsOptions plain;
    plain.n = pus.u.size();
    plain.variant = UsVariant::Plain;
    const auto us = solve_us(p, plain);
    CHECK((us.u.coeffs - pus.u.coeffs).lpNorm<Eigen::Infinity>() <= 1e3 * eps * (1.0 + pus.u.coeffs.lpNorm<Eigen::Infinity>()));

    UsOptions it = plain;
    it.variant = UsVariant::Preconditioned;
    it.backend = LinearBackend::Iterative;
    const auto iter = solve_us(p, it);
    CHECK(iter.diag.method == SolveMethod::BiCGSTAB);
    CHECK((iter.u.coeffs - pus.u.coeffs).lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + pus.u.coeffs.lpNorm<Eigen::Infinity>()));

    CsOptions co;
    co.n = pus.u.size();
    const auto cs = solve_cs(p, co);
    CHECK(max_error(cs.u, [&](double x) { return clenshaw_eval(pus.u, x); }) <= 1e-10);
  }
}

TEST_CASE("fast US operator matches the assembled matrix") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (const OdeProblem& p : {first_order().problem, second_order().problem, fourth_order().problem, tenth_order_example()}) {
    const Index n = 90;
    const UsSystem sys = assemble_us(p, n);
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = dist(rng);
    for (bool pre : {false, true}) {
      const MatrixXd a = pre ? precondition_us(sys).to_dense() : sys.A.to_dense();
      const FastOperator op = us_fast_operator(p, n, pre);
      CHECK((op.apply(v) - a * v).lpNorm<Eigen::Infinity>() <=
            1e3 * eps * a.lpNorm<Eigen::Infinity>() * v.lpNorm<Eigen::Infinity>());
    }
  }
}
