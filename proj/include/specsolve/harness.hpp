#pragma once

// Glue between problem files and the solvers: method dispatch, condition
// tables, error norms, iteration counts and the built-in examples.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specsolve/integral_reform.hpp"
#include "specsolve/problem_file.hpp"
#include "specsolve/solvers.hpp"

namespace specsolve {

// gcs is plain rectangular collocation with the constraint rows appended
enum class Method { CS, US, PUS, Colloc, PlainColloc };

Method method_from_name(std::string_view name);
std::string_view method_name(Method m);
std::vector<Method> parse_method_list(std::string_view list);
std::vector<Index> parse_index_list(std::string_view list);

/// The square matrix each method solves at size n.  For colloc and gcs, n is
/// the number of Gauss collocation points (M = n - 1).
MatrixXd system_matrix(const OdeProblem& problem, Method method, Index n);

/// Largest n whose condition number is taken from a full SVD.
inline constexpr Index kDenseCondLimit = 2048;
/// Largest n the Lanczos estimator is allowed to factor.
inline constexpr Index kPowerCondLimit = 8192;

/// Budget-error above kDenseCondLimit unless allow_power, and always above kPowerCondLimit.
double cond_of(const OdeProblem& problem, Method method, Index n, bool allow_power);

struct CondTable {
  std::vector<Index> ns;
  std::vector<Method> methods;
  MatrixXd values;  // ns x methods

  /// "n,<method>,..." header, entries with 5 significant digits.
  std::string to_csv() const;
};

CondTable cond_table(const OdeProblem& problem, const std::vector<Method>& methods, const std::vector<Index>& ns,
                     bool allow_power);

struct MethodSolution {
  ChebSeries<double> u;
  std::optional<ChebSeries<double>> top;  // u^(m) as solved for (cs only)
  SolveDiagnostics diag;
};

/// Fixed n when given and !adaptive; otherwise doubles from n (or a default)
/// until the coefficient tail drops below tol.
MethodSolution solve_with(const OdeProblem& problem, Method method, std::optional<Index> n, bool adaptive,
                          double tol = 1e-14);

/// Exact values at a set of points.
using Sampler = std::function<VectorXd(const VectorXd&)>;

Sampler sampler_of(const Expression& e);
Sampler sampler_of(const ChebSeries<double>& s);

/// (int (u - exact)^2)^{1/2} by Clenshaw-Curtis on 2 deg(u) + 1 points (at least 65).
double l2_error(const ChebSeries<double>& u, const Sampler& exact);
/// max |u - exact| over 1000 equispaced points including the ends.
double linf_error(const ChebSeries<double>& u, const Sampler& exact);
// series against series: the difference is formed coefficient-wise first
double l2_error(const ChebSeries<double>& u, const ChebSeries<double>& w);
double linf_error(const ChebSeries<double>& u, const ChebSeries<double>& w);

/// L2 norm of u^(m) + sum a_k u^(k) - f with a_k and f taken from the file's
/// expressions rather than their series.  u^(m) is `top` when given, otherwise
/// u differentiated m times.
double equation_residual_l2(const ProblemFile& pf, const ChebSeries<double>& u,
                            const std::optional<ChebSeries<double>>& top = std::nullopt);

/// Exact solution of a first-order problem with one point condition,
/// u(x) = e^{-A(x)} (v e^{A(x0)} + int_{x0}^x e^{A} f), by 16-point
/// Gauss-Legendre on panels no wider than `panel`, accumulated in long double.
VectorXd first_order_oracle(const ProblemFile& pf, const VectorXd& points, double panel = 2e-4);
Sampler quadrature_sampler(const ProblemFile& pf, double panel = 2e-4);

struct IterationCount {
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // ||b - A x||_2 / ||b||_2 at exit
};

/// Bi-CGSTAB from zero on the matrix-free operator of cs, us or pus.
IterationCount bicgstab_iterations(const OdeProblem& problem, Method method, Index n, double tol = 1e-14,
                                   int max_iter = 0);

// built-in problems from the numerical examples
std::string builtin_problem_text(int example);
ProblemFile builtin_problem(int example);

struct CriterionResult {
  std::string name;
  double value = 0.0;
  std::string expected;
  bool pass = false;
};

struct ReproReport {
  int example = 0;
  std::vector<CriterionResult> criteria;
  std::vector<std::string> files;

  bool all_pass() const;
  std::string summary() const;
};

/// Runs the table, error, sparsity and (example 2) iteration pipelines and
/// writes the artifacts under out_dir.
ReproReport run_repro(int example, const std::string& out_dir, bool allow_power = false);

}  // namespace specsolve
