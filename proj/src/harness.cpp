#include "specsolve/harness.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>

#include "specsolve/collocation.hpp"
#include "specsolve/io.hpp"
#include "specsolve/ultraspherical.hpp"

namespace specsolve {

namespace {

using LVec = Vec<long double>;

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_commas(std::string_view list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t stop = list.find(',', start);
    if (stop == std::string_view::npos) stop = list.size();
    out.push_back(trim(list.substr(start, stop - start)));
    start = stop + 1;
  }
  return out;
}

void check_size(Method method, Index n, int m) {
  const Index lo = (method == Method::Colloc || method == Method::PlainColloc) ? 1 : m + 1;
  if (n < lo) throw Error(ErrorKind::InvalidTruncation, "n = " + std::to_string(n) + " too small for " +
                                                             std::string(method_name(method)));
}

// 16-point Gauss-Legendre rule on [-1, 1] in long double
struct GaussLegendre16 {
  std::array<long double, 16> x{}, w{};
  GaussLegendre16() {
    const int n = 16;
    const long double pi = acosl(-1.0L);
    for (int i = 0; i < n; ++i) {
      long double z = cosl(pi * (i + 0.75L) / (n + 0.5L)), dp = 0;
      for (int it = 0; it < 100; ++it) {
        long double p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1);
        const long double dz = p1 / dp;
        z -= dz;
        if (fabsl(dz) < 1e-21L) break;
      }
      x[static_cast<std::size_t>(i)] = z;
      w[static_cast<std::size_t>(i)] = 2 / ((1 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre16& gl16() {
  static const GaussLegendre16 rule;
  return rule;
}

long double clenshaw_ld(const LVec& c, long double x) {
  long double b1 = 0, b2 = 0;
  for (Index k = c.size() - 1; k >= 1; --k) {
    const long double b0 = 2 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

Grid<double> equispaced(Index count) {
  Grid<double> g;
  g.points = VectorXd::LinSpaced(count, -1.0, 1.0);
  return g;
}

VectorXd series_values(const ChebSeries<double>& s, const VectorXd& pts) {
  VectorXd out(pts.size());
  for (Index i = 0; i < pts.size(); ++i) out[i] = clenshaw_unchecked(s, pts[i]);
  return out;
}

// Clenshaw-Curtis grid for squared differences of a degree-`deg` series
struct CcGrid {
  Grid<double> grid;
  VectorXd w;
  explicit CcGrid(Index deg) : n(static_cast<int>(std::max<Index>(64, 2 * deg))) {
    grid = cheb_points<double>(n, GridKind::GaussLobatto);
    w = cc_weights<double>(n);
  }
  // values_on gives the series at the exact points, so anything steep is
  // sampled there too rather than at their double roundings
  Grid<long double> exact_points() const { return cheb_points<long double>(n, GridKind::GaussLobatto); }
  int n;
};

ChebSeries<double> coeffs_from_lobatto(const VectorXd& vals) { return ChebSeries<double>(vals_to_coeffs<double>(vals)); }

MethodSolution colloc_at(const OdeProblem& problem, Index n, bool preconditioned) {
  check_size(preconditioned ? Method::Colloc : Method::PlainColloc, n, problem.order);
  const int M = static_cast<int>(n - 1);
  MethodSolution out;
  if (preconditioned) {
    CollocationOptions o;
    o.M = M;
    const CollocationSolution sol = precondition_solve(problem, o);
    out.u = coeffs_from_lobatto(sol.u);
    out.diag = sol.diag;
    return out;
  }
  if (n > kDenseCondLimit)
    throw Error(ErrorKind::BudgetError, "plain collocation is dense; n = " + std::to_string(n) + " exceeds " +
                                            std::to_string(kDenseCondLimit));
  const PointPair<double> pair = make_point_pair<double>(M, problem.order);
  const CollocationSystem sys = assemble_collocation(problem, pair);
  Eigen::PartialPivLU<MatrixXd> lu(sys.A);
  const VectorXd u = lu.solve(sys.g);
  out.u = coeffs_from_lobatto(u);
  out.diag.n_used = n;
  out.diag.method = SolveMethod::DenseLU;
  out.diag.residual_inf = (sys.A * u - sys.g).lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace

Method method_from_name(std::string_view name) {
  if (name == "cs") return Method::CS;
  if (name == "us") return Method::US;
  if (name == "pus") return Method::PUS;
  if (name == "colloc") return Method::Colloc;
  if (name == "gcs") return Method::PlainColloc;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(name) + "' (cs, us, pus, colloc, gcs)");
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::CS: return "cs";
    case Method::US: return "us";
    case Method::PUS: return "pus";
    case Method::Colloc: return "colloc";
    case Method::PlainColloc: return "gcs";
  }
  return "?";
}

std::vector<Method> parse_method_list(std::string_view list) {
  std::vector<Method> out;
  for (const std::string& s : split_commas(list)) out.push_back(method_from_name(s));
  return out;
}

std::vector<Index> parse_index_list(std::string_view list) {
  std::vector<Index> out;
  for (const std::string& s : split_commas(list)) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || v < 1) throw Error(ErrorKind::InvalidArgument, "bad size '" + s + "'");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

MatrixXd system_matrix(const OdeProblem& problem, Method method, Index n) {
  problem.validate();
  check_size(method, n, problem.order);
  if (n > kPowerCondLimit)
    throw Error(ErrorKind::BudgetError, "dense matrix of size " + std::to_string(n) + " exceeds the budget " +
                                            std::to_string(kPowerCondLimit));
  switch (method) {
    case Method::CS:
      return assemble_cs(problem, n).matrix.to_dense();
    case Method::US:
      return assemble_us(problem, n).A.to_dense();
    case Method::PUS:
      return precondition_us(assemble_us(problem, n)).to_dense();
    case Method::Colloc: {
      const PointPair<double> pair = make_point_pair<double>(static_cast<int>(n - 1), problem.order);
      return assemble_preconditioned(problem, pair, birkhoff_psim<double>(pair, problem.constraints)).A;
    }
    case Method::PlainColloc:
      return assemble_collocation(problem, make_point_pair<double>(static_cast<int>(n - 1), problem.order)).A;
  }
  throw Error(ErrorKind::InternalError, "system_matrix: unknown method");
}

double cond_of(const OdeProblem& problem, Method method, Index n, bool allow_power) {
  if (n > kPowerCondLimit)
    throw Error(ErrorKind::BudgetError, "n = " + std::to_string(n) + " is above the largest supported size " +
                                            std::to_string(kPowerCondLimit));
  if (n > kDenseCondLimit && !allow_power)
    throw Error(ErrorKind::BudgetError, "n = " + std::to_string(n) + " exceeds the dense budget " +
                                            std::to_string(kDenseCondLimit) + "; the iterative estimator needs --power");
  return cond2_estimate(system_matrix(problem, method, n));
}

std::string CondTable::to_csv() const {
  std::ostringstream os;
  os << "n";
  for (Method m : methods) os << "," << method_name(m);
  os << "\n";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    os << ns[i];
    for (std::size_t j = 0; j < methods.size(); ++j) os << "," << fmt5(values(static_cast<Index>(i), static_cast<Index>(j)));
    os << "\n";
  }
  return os.str();
}

CondTable cond_table(const OdeProblem& problem, const std::vector<Method>& methods, const std::vector<Index>& ns,
                     bool allow_power) {
  // check the whole budget before spending time on any entry
  for (Index n : ns) {
    if (n > kPowerCondLimit || (n > kDenseCondLimit && !allow_power)) cond_of(problem, methods.front(), n, allow_power);
  }
  CondTable t;
  t.ns = ns;
  t.methods = methods;
  t.values.resize(static_cast<Index>(ns.size()), static_cast<Index>(methods.size()));
  for (std::size_t i = 0; i < ns.size(); ++i)
    for (std::size_t j = 0; j < methods.size(); ++j)
      t.values(static_cast<Index>(i), static_cast<Index>(j)) = cond_of(problem, methods[j], ns[i], allow_power);
  return t;
}

MethodSolution solve_with(const OdeProblem& problem, Method method, std::optional<Index> n, bool adaptive, double tol) {
  MethodSolution out;
  if (method == Method::CS) {
    CsOptions o;
    o.n = n;
    o.adaptive = adaptive || !n;
    o.tail_tol = tol;
    CsSolution s = solve_cs(problem, o);
    out.u = std::move(s.u);
    out.top = std::move(s.v);
    out.diag = s.diag;
    return out;
  }
  if (method == Method::US || method == Method::PUS) {
    UsOptions o;
    o.n = n;
    o.adaptive = adaptive || !n;
    o.tail_tol = tol;
    o.variant = method == Method::US ? UsVariant::Plain : UsVariant::Preconditioned;
    UsSolution s = solve_us(problem, o);
    out.u = std::move(s.u);
    out.diag = s.diag;
    return out;
  }
  const bool pre = method == Method::Colloc;
  if (n && !adaptive) return colloc_at(problem, *n, pre);
  for (Index k = n ? *n : default_start_size(problem); k <= (Index(1) << 17); k *= 2) {
    out = colloc_at(problem, k, pre);
    if (tail_converged(out.u.coeffs, tol)) return out;
  }
  throw Error(ErrorKind::ResolutionFailure, "collocation: solution tail not resolved");
}

Sampler sampler_of(const Expression& e) {
  return [e](const VectorXd& pts) {
    VectorXd out(pts.size());
    for (Index i = 0; i < pts.size(); ++i) out[i] = static_cast<double>(e(pts[i]));
    return out;
  };
}

Sampler sampler_of(const ChebSeries<double>& s) {
  return [s](const VectorXd& pts) { return series_values(s, pts); };
}

double l2_error(const ChebSeries<double>& u, const Sampler& exact) {
  const CcGrid cc(u.degree());
  const VectorXd d = values_on(u, cc.grid) - exact(cc.grid.points);
  return std::sqrt(std::max(0.0, cc.w.dot(d.cwiseAbs2())));
}

double linf_error(const ChebSeries<double>& u, const Sampler& exact) {
  const Grid<double> g = equispaced(1000);
  return (series_values(u, g.points) - exact(g.points)).lpNorm<Eigen::Infinity>();
}

namespace {

ChebSeries<double> difference(const ChebSeries<double>& u, const ChebSeries<double>& w) {
  const Index n = std::max(u.size(), w.size());
  return ChebSeries<double>(u.padded(n) - w.padded(n));
}

const Sampler kZero = [](const VectorXd& x) { return VectorXd::Zero(x.size()).eval(); };

}  // namespace

double l2_error(const ChebSeries<double>& u, const ChebSeries<double>& w) { return l2_error(difference(u, w), kZero); }

double linf_error(const ChebSeries<double>& u, const ChebSeries<double>& w) {
  return linf_error(difference(u, w), kZero);
}

double equation_residual_l2(const ProblemFile& pf, const ChebSeries<double>& u,
                            const std::optional<ChebSeries<double>>& top) {
  const int m = pf.order;
  const CcGrid cc(top ? std::max(u.degree(), top->degree()) : u.degree());
  const Vec<long double> x = cc.exact_points().points;
  VectorXd r = VectorXd::Zero(x.size());
  VectorXd d = u.coeffs;
  for (int k = 0; k <= m; ++k) {
    if (k > 0) d = cheb_derivative<double>(d);
    const bool has = k == m || (k < static_cast<int>(pf.coeffs.size()) && pf.coeffs[static_cast<std::size_t>(k)]);
    if (!has) continue;
    const VectorXd uk = values_on(k == m && top ? *top : ChebSeries<double>(d), cc.grid);
    if (k == m) {
      r += uk;
    } else {
      const Expression& a = *pf.coeffs[static_cast<std::size_t>(k)];
      for (Index i = 0; i < x.size(); ++i) r[i] += static_cast<double>(a(x[i]) * static_cast<long double>(uk[i]));
    }
  }
  for (Index i = 0; i < x.size(); ++i) r[i] -= static_cast<double>(pf.rhs(x[i]));
  return std::sqrt(std::max(0.0, cc.w.dot(r.cwiseAbs2())));
}

VectorXd first_order_oracle(const ProblemFile& pf, const VectorXd& points, double panel) {
  if (pf.order != 1 || pf.constraints.size() != 1 ||
      pf.constraints[0].kind != ConstraintFunctional::Kind::PointEval || pf.constraints[0].order != 0)
    throw Error(ErrorKind::InvalidArgument, "quadrature oracle needs a first-order problem with one point condition");
  if (!(panel > 0)) throw Error(ErrorKind::InvalidArgument, "quadrature oracle: panel width must be positive");
  const long double x0 = pf.constraints[0].x0;
  const long double v = pf.targets[0];

  // A = int_{-1}^x a0 from the series of a0
  LVec acoef = LVec::Zero(2);
  if (!pf.coeffs.empty() && pf.coeffs[0]) {
    const Expression& a0 = *pf.coeffs[0];
    const ChebSeries<double> s = adaptive_approx([&](double t) { return static_cast<double>(a0(t)); },
                                                 std::min(pf.tol, 1e-15));
    acoef = integrate_coeffs<long double>(s.coeffs.cast<long double>());
  }
  auto A = [&](long double t) { return clenshaw_ld(acoef, t); };
  auto g = [&](long double t) { return expl(A(t)) * pf.rhs(t); };

  std::vector<Index> order(static_cast<std::size_t>(points.size()));
  std::iota(order.begin(), order.end(), Index(0));
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return points[a] < points[b]; });

  // J(t) = int_{-1}^t g, accumulated along the sorted points and x0
  const GaussLegendre16& rule = gl16();
  long double pos = -1.0L, acc = 0.0L;
  auto advance = [&](long double to) {
    if (to <= pos) return;
    const long double len = to - pos;
    const auto npan = static_cast<long>(std::ceil(static_cast<double>(len / panel)));
    const long double h = len / npan;
    for (long p = 0; p < npan; ++p) {
      const long double a = pos + p * h, mid = a + h / 2;
      long double s = 0;
      for (std::size_t q = 0; q < 16; ++q) s += rule.w[q] * g(mid + h / 2 * rule.x[q]);
      acc += s * h / 2;
    }
    pos = to;
  };

  std::vector<long double> J(order.size());
  long double j0 = 0;
  bool have_j0 = false;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const long double t = points[order[k]];
    if (!have_j0 && x0 <= t) {
      advance(x0);
      j0 = acc;
      have_j0 = true;
    }
    advance(t);
    J[k] = acc;
  }
  if (!have_j0) {
    advance(x0);
    j0 = acc;
  }
  VectorXd out(points.size());
  const long double c = v * expl(A(x0)) - j0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const long double t = points[order[k]];
    out[order[k]] = static_cast<double>(expl(-A(t)) * (c + J[k]));
  }
  return out;
}

Sampler quadrature_sampler(const ProblemFile& pf, double panel) {
  return [pf, panel](const VectorXd& pts) { return first_order_oracle(pf, pts, panel); };
}

IterationCount bicgstab_iterations(const OdeProblem& problem, Method method, Index n, double tol, int max_iter) {
  problem.validate();
  check_size(method, n, problem.order);
  if (max_iter <= 0) max_iter = static_cast<int>(10 * n);
  FastOperator op(n, n);
  VectorXd rhs;
  if (method == Method::CS) {
    op = cs_fast_operator(problem, n);
    rhs = cs_rhs(problem, n, build_monomial_block(problem, n));
  } else if (method == Method::US || method == Method::PUS) {
    op = us_fast_operator(problem, n, method == Method::PUS);
    rhs = us_rhs(problem, n);
  } else {
    throw Error(ErrorKind::InvalidArgument, "iteration counts are available for cs, us and pus");
  }
  const LinearSolveResult r = bicgstab_try([&](const VectorXd& x) { return op.apply(x); }, rhs, tol, max_iter);
  IterationCount out;
  out.iterations = r.diag.iterations;
  out.converged = r.diag.converged;
  out.residual = (rhs - op.apply(r.x)).norm() / rhs.norm();
  return out;
}

std::string builtin_problem_text(int example) {
  switch (example) {
    case 1:
      return "# oscillatory first-order problem\n"
             "name = example1\n"
             "order = 1\n"
             "a0 = x^3\n"
             "rhs = 100*sin(20000*x^2)\n"
             "dirichlet(-1) = 0\n";
    case 2:
      return "# Lorentzian coefficient, closed-form solution\n"
             "name = example2\n"
             "order = 1\n"
             "a0 = 1/(50000*x^2 + 1)\n"
             "rhs = 0\n"
             "dirichlet(-1) = 1\n"
             "exact = exp(-(atan(sqrt(50000)*x) + atan(sqrt(50000)))/sqrt(50000))\n";
    case 3:
      return "# tenth-order problem with an odd solution\n"
             "name = example3\n"
             "order = 10\n"
             "a0 = x^2\n"
             "a2 = cos(x)\n"
             "a4 = x^4\n"
             "a6 = x^2\n"
             "a8 = cosh(x)\n"
             "rhs = 0\n"
             "deriv(0, -1) = 0\n"
             "deriv(0, 1) = 0\n"
             "deriv(1, -1) = 1\n"
             "deriv(1, 1) = 1\n"
             "deriv(2, -1) = 0\n"
             "deriv(2, 1) = 0\n"
             "deriv(3, -1) = 0\n"
             "deriv(3, 1) = 0\n"
             "deriv(4, -1) = 0\n"
             "deriv(4, 1) = 0\n";
    default:
      throw Error(ErrorKind::InvalidArgument, "no built-in example " + std::to_string(example) + " (1, 2 or 3)");
  }
}

ProblemFile builtin_problem(int example) { return parse_problem(builtin_problem_text(example)); }

bool ReproReport::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

std::string ReproReport::summary() const {
  std::ostringstream os;
  os << "example " << example << "\n";
  for (const CriterionResult& c : criteria)
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << fmt5(c.value) << " (expected " << c.expected << ")\n";
  for (const std::string& f : files) os << "wrote " << f << "\n";
  return os.str();
}

namespace {

struct Reporter {
  ReproReport& rep;
  std::string dir;

  void check(std::string name, double value, std::string expected, bool pass) {
    rep.criteria.push_back({std::move(name), value, std::move(expected), pass});
  }
  void file(const std::string& name, const std::string& text) {
    const std::string path = dir + "/" + name;
    write_file(path, text);
    rep.files.push_back(path);
  }
  void sparsity(const std::string& stem, const MatrixXd& a) {
    const Pattern p = sparsity_pattern(a);
    std::ostringstream pgm, tri;
    write_pgm(pgm, p);
    write_triples(tri, a, p);
    file(stem + ".pgm", pgm.str());
    file(stem + ".txt", tri.str());
  }
};

// rows below `dense` must stay within `band` of the diagonal
double band_excess(const MatrixXd& a, Index dense, Index band) {
  const Pattern p = sparsity_pattern(a);
  Index worst = 0;
  for (Index i = dense; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (p(i, j)) worst = std::max(worst, std::abs(i - j) - band);
  return static_cast<double>(std::max<Index>(worst, 0));
}

std::string coeffs_csv(const VectorXd& c) {
  std::ostringstream os;
  write_coefficients_csv(os, c);
  return os.str();
}

// u from one Bi-CGSTAB run at fixed n, converged or not
ChebSeries<double> iterate_u(const OdeProblem& problem, Method method, Index n, int max_iter) {
  const int m = problem.order;
  if (method == Method::CS) {
    const FastOperator op = cs_fast_operator(problem, n);
    const MonomialBlock blk = build_monomial_block(problem, n);
    const VectorXd rhs = cs_rhs(problem, n, blk);
    const LinearSolveResult r = bicgstab_try([&](const VectorXd& x) { return op.apply(x); }, rhs, 1e-14, max_iter);
    return recover_u(r.x, problem, blk);
  }
  const bool pre = method == Method::PUS;
  const FastOperator op = us_fast_operator(problem, n, pre);
  const VectorXd rhs = us_rhs(problem, n);
  LinearSolveResult r = bicgstab_try([&](const VectorXd& x) { return op.apply(x); }, rhs, 1e-14, max_iter);
  if (pre) r.x = r.x.cwiseProduct(us_preconditioner(m, n));
  return ChebSeries<double>(r.x);
}

void repro1(Reporter& out, bool allow_power) {
  (void)allow_power;
  const ProblemFile pf = builtin_problem(1);
  const OdeProblem p = pf.to_problem();
  out.file("example1.problem", builtin_problem_text(1));

  const std::vector<Index> ns = {128, 256, 512, 1024};
  const CondTable t = cond_table(p, {Method::US, Method::PUS, Method::CS}, ns, false);
  out.file("table1.csv", t.to_csv());
  const double pus_expected[] = {3.9813, 3.9864, 3.9889, 3.9901};
  bool increasing = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto r = static_cast<Index>(i);
    const std::string n = std::to_string(ns[i]);
    out.check("cs cond n=" + n, t.values(r, 2), "2.5955 +- 0.001", std::abs(t.values(r, 2) - 2.5955) <= 1e-3);
    out.check("pus cond n=" + n, t.values(r, 1), fmt5(pus_expected[i]) + " +- 0.01",
              std::abs(t.values(r, 1) - pus_expected[i]) <= 1e-2);
    if (i > 0) increasing = increasing && t.values(r, 0) > t.values(r - 1, 0);
  }
  out.check("us cond n=128", t.values(0, 0), "240.45 +- 1%", std::abs(t.values(0, 0) / 240.45 - 1) <= 0.01);
  out.check("us cond increasing in n", t.values(static_cast<Index>(ns.size()) - 1, 0), "strictly increasing", increasing);

  const MethodSolution sol = solve_with(p, Method::CS, std::nullopt, true, pf.tol);
  out.file("solution_cs.csv", coeffs_csv(sol.u.coeffs));
  const double l2 = l2_error(sol.u, quadrature_sampler(pf));
  // the method's own u' is v; differentiating the recovered u again costs O(n) eps
  const double res = equation_residual_l2(pf, sol.u, sol.top);
  const double res_diff = equation_residual_l2(pf, sol.u);
  out.file("errors.txt", "degree: " + std::to_string(sol.u.degree()) + "\nl2_error_u: " + fmt5(l2) +
                             "\nl2_residual_derivative: " + fmt5(res) +
                             "\nl2_residual_differentiated_u: " + fmt5(res_diff) + "\n");
  out.check("cs l2 error of u", l2, "<= 1e-12", l2 <= 1e-12);
  out.check("cs derivative residual", res, "<= 1e-12", res <= 1e-12);

  const MatrixXd us50 = system_matrix(p, Method::US, 50);
  const MatrixXd cs50 = system_matrix(p, Method::CS, 50);
  out.sparsity("sparsity_us_n50", us50);
  out.sparsity("sparsity_cs_n50", cs50);
  out.check("cs n=50 banded below the top 4 rows", band_excess(cs50, 4, 4), "0", band_excess(cs50, 4, 4) == 0);
  out.check("us n=50 banded below the boundary row", band_excess(us50, 1, 5), "0", band_excess(us50, 1, 5) == 0);
}

void repro2(Reporter& out, bool allow_power) {
  const ProblemFile pf = builtin_problem(2);
  const OdeProblem p = pf.to_problem();
  out.file("example2.problem", builtin_problem_text(2));

  std::vector<Index> ns = {1024, 2048};
  if (allow_power) ns.insert(ns.end(), {4096, 8192});
  const CondTable t = cond_table(p, {Method::US, Method::PUS, Method::CS}, ns, allow_power);
  out.file("table2.csv", t.to_csv());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto r = static_cast<Index>(i);
    const std::string n = std::to_string(ns[i]);
    out.check("cs cond n=" + n, t.values(r, 2), "1.0912 +- 0.001", std::abs(t.values(r, 2) - 1.0912) <= 1e-3);
    out.check("pus cond n=" + n, t.values(r, 1), "3.326 +- 0.005", std::abs(t.values(r, 1) - 3.326) <= 5e-3);
  }

  std::ostringstream iters;
  iters << "n,cs,pus,us\n";
  const std::vector<Index> its = {1024, 2048, 4096};
  std::vector<std::array<IterationCount, 3>> counts;
  for (Index n : its) {
    std::array<IterationCount, 3> c = {bicgstab_iterations(p, Method::CS, n, 1e-14, 2000),
                                       bicgstab_iterations(p, Method::PUS, n, 1e-14, 2000),
                                       bicgstab_iterations(p, Method::US, n, 1e-14, 2000)};
    iters << n;
    for (const auto& k : c) iters << "," << (k.converged ? std::to_string(k.iterations) : "no-conv");
    iters << "\n";
    counts.push_back(c);
  }
  out.file("iterations.csv", iters.str());
  for (int j = 0; j < 2; ++j) {
    int spread = 0;
    bool conv = true;
    for (const auto& c : counts) {
      spread = std::max(spread, std::abs(c[j].iterations - counts[0][j].iterations));
      conv = conv && c[j].converged;
    }
    out.check(std::string(j == 0 ? "cs" : "pus") + " iteration spread", spread, "<= 2 and converged",
              conv && spread <= 2);
  }
  const IterationCount& us4096 = counts.back()[2];
  const int fast = std::max(counts.back()[0].iterations, counts.back()[1].iterations);
  out.check("us iterations at n=4096 over cs/pus", us4096.converged ? double(us4096.iterations) / fast : INFINITY,
            ">= 5 or no convergence", !us4096.converged || us4096.iterations >= 5 * fast);

  const Sampler exact = sampler_of(*pf.exact);
  std::ostringstream curve;
  curve << "n,us,pus,cs\n";
  for (Index n : {1024, 2048, 4096, 8192}) {
    curve << n;
    for (Method m : {Method::US, Method::PUS, Method::CS}) curve << "," << fmt5(l2_error(iterate_u(p, m, n, 2000), exact));
    curve << "\n";
  }
  out.file("error_curve.csv", curve.str());

  const MethodSolution sol = solve_with(p, Method::CS, std::nullopt, true, pf.tol);
  out.file("solution_cs.csv", coeffs_csv(sol.u.coeffs));
  const double l2 = l2_error(sol.u, exact);
  out.check("cs l2 error vs closed form", l2, "<= 1e-10", l2 <= 1e-10);
}

void repro3(Reporter& out, bool allow_power) {
  (void)allow_power;
  const ProblemFile pf = builtin_problem(3);
  const OdeProblem p = pf.to_problem();
  out.file("example3.problem", builtin_problem_text(3));

  std::ostringstream cond;
  cond << "n,cs\n";
  for (Index n : {64, 128, 256}) {
    const double c = cond_of(p, Method::CS, n, false);
    cond << n << "," << fmt5(c) << "\n";
    out.check("cs cond n=" + std::to_string(n), c, "1.7444 +- 0.001", std::abs(c - 1.7444) <= 1e-3);
  }
  out.file("cond.csv", cond.str());

  const MethodSolution sol = solve_with(p, Method::CS, 128, false);
  out.file("solution_cs.csv", coeffs_csv(sol.u.coeffs));
  double even = 0.0;
  for (Index j = 0; j < sol.u.size(); j += 2) even = std::max(even, std::abs(sol.u.coeffs[j]));
  out.check("odd symmetry: max even coefficient", even, "<= 1e-12", even <= 1e-12);
  out.sparsity("sparsity_cs_n100", system_matrix(p, Method::CS, 100));
}

}  // namespace

ReproReport run_repro(int example, const std::string& out_dir, bool allow_power) {
  ReproReport rep;
  rep.example = example;
  Reporter out{rep, out_dir};
  switch (example) {
    case 1: repro1(out, allow_power); break;
    case 2: repro2(out, allow_power); break;
    case 3: repro3(out, allow_power); break;
    default: throw Error(ErrorKind::InvalidArgument, "repro: example must be 1, 2 or 3");
  }
  out.file("summary.txt", rep.summary());
  return rep;
}

}  // namespace specsolve
