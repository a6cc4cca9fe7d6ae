#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

#include "specsolve/error.hpp"

namespace specsolve {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Banded matrix whose first `dense_rows` rows are stored in full.
///
/// Row i >= dense_rows holds entries only for columns j with
/// -lower <= j - i <= upper; rows above that are dense.  Bandwidths are capped
/// at the matrix extent so wide-band operators never store more than a
/// rows x (rows + cols - 1) strip.
class AlmostBandedMatrix {
 public:
  AlmostBandedMatrix() = default;
  AlmostBandedMatrix(Index rows, Index cols, Index lower, Index upper, Index dense_rows);

  static AlmostBandedMatrix identity(Index n);
  /// Copies the entries of `a` that fall inside the requested structure.
  static AlmostBandedMatrix from_dense(const MatrixXd& a, Index lower, Index upper, Index dense_rows);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index lower() const { return l_; }
  Index upper() const { return u_; }
  Index dense_rows() const { return r_; }

  /// Column range [row_begin, row_end) that row i may populate.
  Index row_begin(Index i) const { return i < r_ ? 0 : std::max<Index>(0, i - l_); }
  Index row_end(Index i) const { return i < r_ ? cols_ : std::min<Index>(cols_, i + u_ + 1); }
  bool in_structure(Index i, Index j) const {
    return i >= 0 && i < rows_ && j >= row_begin(i) && j < row_end(i);
  }

  double get(Index i, Index j) const {
    if (!in_structure(i, j)) return 0.0;
    return *slot(i, j);
  }
  void set(Index i, Index j, double v) { *checked_slot(i, j) = v; }
  void add(Index i, Index j, double v) { *checked_slot(i, j) += v; }

  /// Pointer to entry (i, row_begin(i)); entries of the row are contiguous.
  double* row_data(Index i) { return slot(i, row_begin(i)); }
  const double* row_data(Index i) const { return slot(i, row_begin(i)); }

  VectorXd matvec(const VectorXd& v) const;
  MatrixXd to_dense() const;
  AlmostBandedMatrix cropped(Index rows, Index cols) const;
  /// A * diag(s).
  AlmostBandedMatrix scaled_columns(const VectorXd& s) const;
  AlmostBandedMatrix scaled(double alpha) const;
  /// Same entries in a (weakly) larger structure.
  AlmostBandedMatrix restructured(Index lower, Index upper, Index dense_rows) const;
  /// Entries outside the band below tolerance are removed by shrinking the structure.
  AlmostBandedMatrix with_band(Index lower, Index upper) const;

  double max_abs() const;
  double norm_inf() const;

 private:
  double* slot(Index i, Index j) {
    if (i < r_) return dense_.data() + i * cols_ + j;
    return band_.data() + (i - r_) * width() + (j - i + l_);
  }
  const double* slot(Index i, Index j) const {
    return const_cast<AlmostBandedMatrix*>(this)->slot(i, j);
  }
  double* checked_slot(Index i, Index j) {
    if (!in_structure(i, j))
      throw Error(ErrorKind::InvalidArgument, "AlmostBandedMatrix: entry (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ") outside structure");
    return slot(i, j);
  }
  Index width() const { return l_ + u_ + 1; }

  Index rows_ = 0, cols_ = 0, l_ = 0, u_ = 0, r_ = 0;
  std::vector<double> band_;   // (rows - r) x (l + u + 1)
  std::vector<double> dense_;  // r x cols, row-major
};

AlmostBandedMatrix operator+(const AlmostBandedMatrix& a, const AlmostBandedMatrix& b);
AlmostBandedMatrix operator-(const AlmostBandedMatrix& a, const AlmostBandedMatrix& b);
/// Product with summed bandwidths; dense rows of b propagate through a's lower band.
AlmostBandedMatrix multiply(const AlmostBandedMatrix& a, const AlmostBandedMatrix& b);

}  // namespace specsolve
