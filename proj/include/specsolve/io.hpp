#pragma once

// Plain-text artifacts: coefficient CSV files, sparsity bitmaps and
// coordinate lists.

#include <iosfwd>
#include <string>

#include "specsolve/cheb.hpp"

namespace specsolve {

/// Header line, then "j,coefficient" rows with 17 significant digits.
void write_coefficients_csv(std::ostream& os, const VectorXd& c);
VectorXd read_coefficients_csv(std::istream& is);
void save_coefficients(const std::string& path, const VectorXd& c);
VectorXd load_coefficients(const std::string& path);

using Pattern = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// |a_ij| > 10 eps max|a|.
Pattern sparsity_pattern(const MatrixXd& a);
/// Plain (P2) PGM, black where the pattern is set.
void write_pgm(std::ostream& os, const Pattern& p);
/// "i j value" per nonzero, zero-based, row-major order.
void write_triples(std::ostream& os, const MatrixXd& a, const Pattern& p);

/// Printf-style "%.5g", the precision used in summaries and tables.
std::string fmt5(double v);
std::string fmt17(double v);

/// Writes `text` to `path`, creating parent directories; io failure throws invalid-argument.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace specsolve
