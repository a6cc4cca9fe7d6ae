// specsolve: solve, condition tables, error norms, sparsity plots and the
// reproduction runs for the built-in examples.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "specsolve/harness.hpp"
#include "specsolve/io.hpp"

using namespace specsolve;

namespace {

constexpr int kOk = 0, kFail = 1, kUsage = 2;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

int cmd_solve(const std::string& file, const std::string& method_opt, Index n_opt, bool adaptive,
              const std::string& out, const std::string& diag_path) {
  const ProblemFile pf = load_problem(file);
  const OdeProblem p = pf.to_problem();
  const Method method = method_from_name(!method_opt.empty() ? method_opt : pf.method.value_or("cs"));
  std::optional<Index> n = pf.n;
  if (n_opt > 0) n = n_opt;
  const MethodSolution sol = solve_with(p, method, n, adaptive, pf.tol);

  std::ostringstream csv;
  write_coefficients_csv(csv, sol.u.coeffs);
  emit(out, csv.str());

  std::ostringstream d;
  d << "{\n";
  d << "problem: " << (pf.name.empty() ? file : pf.name) << "\n";
  d << "discretization: " << method_name(method) << "\n";
  d << "coefficients: " << sol.u.size() << "\n";
  d << sol.diag.to_text();
  d << "}\n";
  if (diag_path.empty())
    std::cerr << d.str();
  else
    write_file(diag_path, d.str());
  return kOk;
}

int cmd_cond_table(const std::string& file, const std::string& methods, const std::string& ns, bool power,
                   const std::string& out) {
  const ProblemFile pf = load_problem(file);
  const CondTable t = cond_table(pf.to_problem(), parse_method_list(methods), parse_index_list(ns), power);
  emit(out, t.to_csv());
  return kOk;
}

int cmd_error(const std::string& solution, const std::string& exact, const std::string& quad_of,
              const std::string& against, const std::string& residual_of, const std::string& norm) {
  const ChebSeries<double> u(load_coefficients(solution));
  double value = 0.0;
  if (!residual_of.empty()) {
    if (norm != "l2") throw Error(ErrorKind::InvalidArgument, "--residual-of supports --norm l2 only");
    value = equation_residual_l2(load_problem(residual_of), u);
  } else {
    if (!against.empty()) {
      const ChebSeries<double> w(load_coefficients(against));
      value = norm == "l2" ? l2_error(u, w) : linf_error(u, w);
    } else {
      const Sampler s = !exact.empty() ? sampler_of(parse_expression(exact)) : quadrature_sampler(load_problem(quad_of));
      value = norm == "l2" ? l2_error(u, s) : linf_error(u, s);
    }
  }
  std::printf("%.17g\n", value);
  return kOk;
}

int cmd_sparsity(const std::string& file, const std::string& method, Index n, const std::string& stem) {
  const ProblemFile pf = load_problem(file);
  const MatrixXd a = system_matrix(pf.to_problem(), method_from_name(method), n);
  const Pattern p = sparsity_pattern(a);
  std::ostringstream pgm, tri;
  write_pgm(pgm, p);
  write_triples(tri, a, p);
  write_file(stem + ".pgm", pgm.str());
  write_file(stem + ".txt", tri.str());
  std::cout << "wrote " << stem << ".pgm and " << stem << ".txt (" << p.count() << " nonzeros)\n";
  return kOk;
}

int cmd_repro(int example, const std::string& dir, bool power) {
  const ReproReport rep = run_repro(example, dir, power);
  std::cout << rep.summary();
  return rep.all_pass() ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Well-conditioned spectral solvers for linear ODE boundary value problems"};
  app.require_subcommand(1);

  std::string file, method, out, diag, methods = "us,pus,cs", ns, exact, quad_of, against, residual_of, norm = "l2";
  Index n = 0;
  bool adaptive = false, power = false;
  int example = 0;

  auto* solve = app.add_subcommand("solve", "solve a problem file and write Chebyshev coefficients");
  solve->add_option("file", file, "problem file")->required();
  solve->add_option("--method", method, "cs, us, pus, colloc or gcs (default: the file's method, else cs)")
      ->check(CLI::IsMember({"cs", "us", "pus", "colloc", "gcs"}));
  solve->add_option("--n", n, "truncation size (for colloc: number of collocation points)")->check(CLI::PositiveNumber);
  solve->add_flag("--adaptive", adaptive, "double n until the coefficient tail is below the file's tol");
  solve->add_option("--out", out, "coefficient CSV (default stdout)");
  solve->add_option("--diag", diag, "diagnostics file (default stderr)");

  auto* table = app.add_subcommand("cond-table", "condition numbers of the assembled matrices");
  table->add_option("file", file, "problem file")->required();
  table->add_option("--method", methods, "comma-separated methods");
  table->add_option("--n", ns, "comma-separated sizes")->required();
  table->add_flag("--power", power, "allow the iterative estimator for n above 2048");
  table->add_option("--out", out, "CSV output (default stdout)");

  auto* err = app.add_subcommand("error", "L2 or max-norm error of a coefficient file");
  err->add_option("solution", file, "coefficient CSV")->required();
  auto* ex = err->add_option("--exact", exact, "exact solution as an expression in x");
  auto* qo = err->add_option("--quadrature-of", quad_of, "first-order problem file; exact u by quadrature");
  auto* ag = err->add_option("--against", against, "another coefficient CSV");
  auto* ro = err->add_option("--residual-of", residual_of, "problem file; L2 norm of the equation residual");
  ex->excludes(qo, ag, ro);
  qo->excludes(ag, ro);
  ag->excludes(ro);
  err->add_option("--norm", norm, "l2 or linf")->check(CLI::IsMember({"l2", "linf"}));

  auto* sp = app.add_subcommand("sparsity", "PGM bitmap and coordinate list of a system matrix");
  sp->add_option("file", file, "problem file")->required();
  sp->add_option("--method", method, "cs, us, pus, colloc or gcs")
      ->required()
      ->check(CLI::IsMember({"cs", "us", "pus", "colloc", "gcs"}));
  sp->add_option("--n", n, "matrix size")->required()->check(CLI::PositiveNumber);
  sp->add_option("--out", out, "output stem; writes STEM.pgm and STEM.txt")->required();

  auto* repro = app.add_subcommand("repro", "reproduce the tables and checks of a built-in example");
  repro->add_option("example", example, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  repro->add_option("--out", out, "artifact directory (default repro<k>)");
  repro->add_flag("--power", power, "include the n = 4096 and 8192 rows of the example 2 table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(file, method, n, adaptive, out, diag);
    if (*table) return cmd_cond_table(file, methods, ns, power, out);
    if (*err) {
      if (exact.empty() && quad_of.empty() && against.empty() && residual_of.empty()) {
        std::cerr << "error: one of --exact, --quadrature-of, --against or --residual-of is required\n";
        return kUsage;
      }
      return cmd_error(file, exact, quad_of, against, residual_of, norm);
    }
    if (*sp) return cmd_sparsity(file, method, n, out);
    if (*repro) return cmd_repro(example, out.empty() ? "repro" + std::to_string(example) : out, power);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    const ErrorKind k = e.kind();
    return (k == ErrorKind::ParseError || k == ErrorKind::BudgetError || k == ErrorKind::InvalidArgument) ? kUsage
                                                                                                           : kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
