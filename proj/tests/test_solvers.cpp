#include <doctest.h>

#include <Eigen/QR>

#include <cmath>
#include <random>

#include "specsolve/solvers.hpp"

using namespace specsolve;

namespace {

constexpr double eps = 2.220446049250313e-16;

AlmostBandedMatrix random_almost_banded(std::mt19937& rng, Index n, Index l, Index u, Index r) {
  std::uniform_real_distribution<double> dist(-1, 1);
  AlmostBandedMatrix a(n, n, l, u, r);
  for (Index i = 0; i < n; ++i)
    for (Index j = a.row_begin(i); j < a.row_end(i); ++j) a.set(i, j, dist(rng));
  // push the diagonal up so most draws are comfortably nonsingular
  for (Index i = 0; i < n; ++i) a.add(i, i, 4.0 + static_cast<double>(l + u));
  return a;
}

MatrixXd random_orthogonal(std::mt19937& rng, Index n) {
  std::normal_distribution<double> g;
  MatrixXd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<MatrixXd> qr(m);
  return qr.householderQ() * MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("dense_qr_solve") {
  const VectorXd b = VectorXd::LinSpaced(5, 1, 5);
  CHECK((dense_qr_solve(MatrixXd::Identity(5, 5), b) - b).norm() == 0.0);

  MatrixXd d(2, 2);
  d << 2, 0, 0, 4;
  VectorXd rhs(2);
  rhs << 2, 4;
  const VectorXd x = dense_qr_solve(d, rhs);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1, 1);
  MatrixXd a(100, 100);
  for (Index i = 0; i < 100; ++i)
    for (Index j = 0; j < 100; ++j) a(i, j) = dist(rng) + (i == j ? 30.0 : 0.0);
  VectorXd bb(100);
  for (Index i = 0; i < 100; ++i) bb[i] = dist(rng);
  const VectorXd xx = dense_qr_solve(a, bb);
  CHECK((a * xx - bb).lpNorm<Eigen::Infinity>() <=
        1e3 * eps * a.lpNorm<Eigen::Infinity>() * xx.lpNorm<Eigen::Infinity>());

  MatrixXd sing(2, 2);
  sing << 1, 2, 2, 4;
  CHECK_THROWS_AS(dense_qr_solve(sing, rhs), Error);
  CHECK_THROWS_AS(dense_qr_solve(MatrixXd::Identity(2, 3), rhs), Error);
}

TEST_CASE("almost-banded QR matches dense QR on random structured systems") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pick(0, 6);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = trial < 190 ? 8 + 3 * trial : 1024;
    const Index l = pick(rng), u = pick(rng), r = pick(rng);
    const AlmostBandedMatrix a = random_almost_banded(rng, n, l, u, std::min(r, n));
    VectorXd b(n);
    for (Index i = 0; i < n; ++i) b[i] = dist(rng);
    const MatrixXd ad = a.to_dense();
    const VectorXd ref = dense_qr_solve(ad, b);
    const auto got = almost_banded_qr_solve(a, b);
    const double cond = n <= 256 ? cond2_svd(ad) : 1e2;
    CAPTURE(trial);
    CHECK((got.x - ref).lpNorm<Eigen::Infinity>() <= 1e3 * eps * cond * ref.lpNorm<Eigen::Infinity>());
    CHECK(got.diag.method == SolveMethod::AlmostBandedQR);
  }
}

TEST_CASE("almost-banded QR edge cases") {
  const VectorXd b = VectorXd::LinSpaced(6, -1, 2);
  const auto id = almost_banded_qr_solve(AlmostBandedMatrix::identity(6), b);
  CHECK((id.x - b).lpNorm<Eigen::Infinity>() == 0.0);

  // dense rows present but zero beyond the diagonal
  AlmostBandedMatrix a(6, 6, 1, 1, 2);
  for (Index i = 0; i < 6; ++i) a.set(i, i, 1.0);
  CHECK((almost_banded_qr_solve(a, b).x - b).lpNorm<Eigen::Infinity>() <= 4 * eps);

  AlmostBandedMatrix z(3, 3, 0, 0, 0);
  z.set(0, 0, 1.0);
  z.set(2, 2, 1.0);
  CHECK_THROWS_AS(almost_banded_qr_solve(z, VectorXd::Ones(3)), Error);
}

TEST_CASE("adaptive_solve grows until the tail is negligible") {
  int calls = 0;
  auto solve_at = [&](Index n) {
    ++calls;
    LinearSolveResult r;
    r.x.resize(n);
    for (Index j = 0; j < n; ++j) r.x[j] = std::pow(0.5, static_cast<double>(j));
    return r;
  };
  const auto res = adaptive_solve(solve_at, AdaptiveSchedule{16, 1024, 1e-14});
  CHECK(res.x.size() == 64);  // 0.5^56 ~ 1.4e-17 is the first tail below 1e-14
  CHECK(calls == 3);
  CHECK_THROWS_AS(adaptive_solve(solve_at, AdaptiveSchedule{16, 32, 1e-14}), Error);
  CHECK(tail_converged(VectorXd::Zero(4), 1e-14));
}

TEST_CASE("bicgstab") {
  const VectorXd b = VectorXd::LinSpaced(10, 1, 10);
  const auto id = bicgstab_solve([](const VectorXd& x) { return x; }, b, 1e-14, 10);
  CHECK(id.diag.iterations == 1);
  CHECK((id.x - b).norm() <= 1e-14 * b.norm());

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> dist(-1, 1);
  MatrixXd a = MatrixXd::Identity(80, 80);
  for (Index i = 0; i < 80; ++i)
    for (Index j = 0; j < 80; ++j) a(i, j) += 0.2 * dist(rng) / std::sqrt(80.0);
  VectorXd rhs(80);
  for (Index i = 0; i < 80; ++i) rhs[i] = dist(rng);
  const auto res = bicgstab_solve([&](const VectorXd& x) { return VectorXd(a * x); }, rhs, 1e-14, 400);
  CHECK(res.diag.converged);
  CHECK(res.diag.recursive_residual <= 1e-14);
  // the true residual tracks the recursive one
  const double true_rel = (a * res.x - rhs).norm() / rhs.norm();
  CHECK(std::abs(true_rel - res.diag.recursive_residual) <= 10 * eps * a.norm() * res.x.norm() / rhs.norm());

  // a rotation by 90 degrees stalls the minimal residual step
  MatrixXd rot(2, 2);
  rot << 0, -1, 1, 0;
  VectorXd e(2);
  e << 1, 0;
  CHECK_THROWS_AS(bicgstab_solve([&](const VectorXd& x) { return VectorXd(rot * x); }, e, 1e-14, 50), Error);
  const auto tried = bicgstab_try([&](const VectorXd& x) { return VectorXd(rot * x); }, e, 1e-14, 50);
  CHECK_FALSE(tried.diag.converged);

  const auto zero = bicgstab_solve([](const VectorXd& x) { return x; }, VectorXd::Zero(3), 1e-14, 5);
  CHECK(zero.x.norm() == 0.0);
}

TEST_CASE("condition number estimates") {
  CHECK(cond2_estimate(MatrixXd::Identity(4, 4)) == doctest::Approx(1.0));
  MatrixXd d(2, 2);
  d << 1, 0, 0, 10;
  CHECK(cond2_estimate(d) == doctest::Approx(10.0));
  MatrixXd s(2, 2);
  s << 1, 1, 1, 1;
  CHECK(std::isinf(cond2_estimate(s)));

  std::mt19937 rng(9);
  for (Index n : {50, 300}) {
    const MatrixXd u = random_orthogonal(rng, n), v = random_orthogonal(rng, n);
    VectorXd sig(n);
    for (Index i = 0; i < n; ++i) sig[i] = std::pow(1e3, static_cast<double>(i) / static_cast<double>(n - 1));
    const MatrixXd a = u * sig.asDiagonal() * v.transpose();
    CHECK(cond2_svd(a) == doctest::Approx(1e3).epsilon(1e-4));
    CHECK(cond2_lanczos(a) == doctest::Approx(1e3).epsilon(1e-4));
  }
}

TEST_CASE("diagnostics text") {
  SolveDiagnostics d;
  d.n_used = 128;
  d.method = SolveMethod::AlmostBandedQR;
  d.cond2 = 2.59547;
  const std::string t = d.to_text();
  CHECK(t.find("n_used: 128") != std::string::npos);
  CHECK(t.find("method: almost-banded-qr") != std::string::npos);
  CHECK(t.find("cond2: 2.5955") != std::string::npos);
}
