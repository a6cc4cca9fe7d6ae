#pragma once

// The line-oriented problem format read by the command-line tool; the grammar
// is written up in docs/format.md.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specsolve/expression.hpp"
#include "specsolve/problem.hpp"

namespace specsolve {

struct ProblemFile {
  std::string name;
  int order = 0;
  std::vector<std::optional<Expression>> coeffs;  // a0 .. a{m-1}; empty slots are zero
  Expression rhs;
  std::vector<ConstraintFunctional> constraints;
  std::vector<double> targets;
  std::optional<Expression> exact;

  // solver options
  double tol = 1e-14;  // chop tolerance for the expression samples and the solution tail
  std::optional<Eigen::Index> n;
  std::optional<std::string> method;

  /// Samples the expressions adaptively (tolerance `tol`) into Chebyshev series.
  OdeProblem to_problem() const;
};

/// Throws parse-error with a line:col anchor and the expected-token set.
ProblemFile parse_problem(std::string_view text);
ProblemFile load_problem(const std::string& path);

/// Canonical text; parse_problem(format_problem(p)) reproduces p.
std::string format_problem(const ProblemFile& p);

}  // namespace specsolve
