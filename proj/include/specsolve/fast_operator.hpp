#pragma once

// Structured linear maps applied in O(n log n): Toeplitz-plus-Hankel blocks
// (the multiplication operator M_0[a]) sandwiched between almost-banded
// factors, plus dense top rows and an optional low-rank correction.

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "specsolve/almost_banded.hpp"
#include "specsolve/cheb.hpp"

namespace specsolve {

/// entry(i, j) = toeplitz[i - j + cols - 1] + (i >= hankel_first_row ? hankel[i + j] : 0)
class ToeplitzHankel {
 public:
  ToeplitzHankel(Index rows, Index cols, VectorXd toeplitz, VectorXd hankel, Index hankel_first_row);

  /// Truncation of M_0[a] to rows x cols.
  static ToeplitzHankel chebyshev_multiplication(const ChebSeries<double>& a, Index rows, Index cols);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  double entry(Index i, Index j) const;

  /// Circulant-embedded FFT product.
  VectorXd apply(const VectorXd& v) const;
  /// Entry-by-entry O(rows * cols) product, for reference timings and checks.
  VectorXd apply_reference(const VectorXd& v) const;

 private:
  Index rows_, cols_, hankel_first_row_;
  VectorXd toeplitz_, hankel_;
  Index fft_size_;
  std::vector<std::complex<double>> toeplitz_hat_, hankel_hat_;
};

struct FastTerm {
  std::optional<AlmostBandedMatrix> left;
  std::optional<ToeplitzHankel> middle;
  std::optional<AlmostBandedMatrix> right;
  double scale = 1.0;
};

/// out = [top * v' ; sum_k scale_k * left_k(middle_k(right_k v')) + U (V v')],  v' = diag(col_scale) v.
class FastOperator {
 public:
  FastOperator(Index rows, Index cols) : rows_(rows), cols_(cols) {}

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  void set_top_rows(RowMatrixXd top);
  void add_term(FastTerm term);
  void set_low_rank(MatrixXd u, MatrixXd v);
  void set_column_scaling(VectorXd s);

  VectorXd apply(const VectorXd& v) const;
  VectorXd apply_reference(const VectorXd& v) const;
  MatrixXd to_dense() const;

 private:
  Index body_rows() const { return rows_ - top_.rows(); }
  template <class ApplyTh>
  VectorXd apply_impl(const VectorXd& v, ApplyTh&& th) const;

  Index rows_, cols_;
  RowMatrixXd top_ = RowMatrixXd(0, 0);
  std::vector<FastTerm> terms_;
  MatrixXd low_u_, low_v_;
  VectorXd col_scale_;
};

/// Applies the operator; equals the dense product up to FFT rounding.
inline VectorXd fast_matvec(const FastOperator& op, const VectorXd& v) { return op.apply(v); }

}  // namespace specsolve
