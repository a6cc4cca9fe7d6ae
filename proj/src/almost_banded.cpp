#include "specsolve/almost_banded.hpp"

#include <cmath>

namespace specsolve {

AlmostBandedMatrix::AlmostBandedMatrix(Index rows, Index cols, Index lower, Index upper, Index dense_rows)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0 || lower < 0 || upper < 0 || dense_rows < 0)
    throw Error(ErrorKind::InvalidArgument, "AlmostBandedMatrix: negative size");
  l_ = std::min(lower, std::max<Index>(rows - 1, 0));
  u_ = std::min(upper, std::max<Index>(cols - 1, 0));
  r_ = std::min(dense_rows, rows);
  band_.assign(static_cast<std::size_t>((rows_ - r_) * width()), 0.0);
  dense_.assign(static_cast<std::size_t>(r_ * cols_), 0.0);
}

AlmostBandedMatrix AlmostBandedMatrix::identity(Index n) {
  AlmostBandedMatrix a(n, n, 0, 0, 0);
  for (Index i = 0; i < n; ++i) a.set(i, i, 1.0);
  return a;
}

AlmostBandedMatrix AlmostBandedMatrix::from_dense(const MatrixXd& a, Index lower, Index upper, Index dense_rows) {
  AlmostBandedMatrix out(a.rows(), a.cols(), lower, upper, dense_rows);
  for (Index i = 0; i < out.rows_; ++i) {
    double* p = out.row_data(i);
    for (Index j = out.row_begin(i); j < out.row_end(i); ++j) *p++ = a(i, j);
  }
  return out;
}

VectorXd AlmostBandedMatrix::matvec(const VectorXd& v) const {
  if (v.size() != cols_) throw Error(ErrorKind::InvalidArgument, "matvec: size mismatch");
  VectorXd out(rows_);
  for (Index i = 0; i < rows_; ++i) {
    const Index b = row_begin(i), e = row_end(i);
    const double* p = row_data(i);
    double acc = 0.0;
    for (Index j = b; j < e; ++j) acc += p[j - b] * v[j];
    out[i] = acc;
  }
  return out;
}

MatrixXd AlmostBandedMatrix::to_dense() const {
  MatrixXd out = MatrixXd::Zero(rows_, cols_);
  for (Index i = 0; i < rows_; ++i) {
    const Index b = row_begin(i), e = row_end(i);
    const double* p = row_data(i);
    for (Index j = b; j < e; ++j) out(i, j) = p[j - b];
  }
  return out;
}

AlmostBandedMatrix AlmostBandedMatrix::cropped(Index rows, Index cols) const {
  if (rows > rows_ || cols > cols_) throw Error(ErrorKind::InvalidTruncation, "cropped: larger than source");
  AlmostBandedMatrix out(rows, cols, l_, u_, r_);
  for (Index i = 0; i < out.rows_; ++i) {
    double* p = out.row_data(i);
    for (Index j = out.row_begin(i); j < out.row_end(i); ++j) *p++ = get(i, j);
  }
  return out;
}

AlmostBandedMatrix AlmostBandedMatrix::scaled_columns(const VectorXd& s) const {
  if (s.size() != cols_) throw Error(ErrorKind::InvalidArgument, "scaled_columns: size mismatch");
  AlmostBandedMatrix out = *this;
  for (Index i = 0; i < rows_; ++i) {
    double* p = out.row_data(i);
    for (Index j = row_begin(i); j < row_end(i); ++j) *p++ *= s[j];
  }
  return out;
}

AlmostBandedMatrix AlmostBandedMatrix::scaled(double alpha) const {
  AlmostBandedMatrix out = *this;
  for (double& x : out.band_) x *= alpha;
  for (double& x : out.dense_) x *= alpha;
  return out;
}

AlmostBandedMatrix AlmostBandedMatrix::restructured(Index lower, Index upper, Index dense_rows) const {
  AlmostBandedMatrix out(rows_, cols_, std::max(lower, l_), std::max(upper, u_), std::max(dense_rows, r_));
  for (Index i = 0; i < rows_; ++i) {
    const Index b = row_begin(i), e = row_end(i);
    const double* p = row_data(i);
    for (Index j = b; j < e; ++j) out.set(i, j, p[j - b]);
  }
  return out;
}

AlmostBandedMatrix AlmostBandedMatrix::with_band(Index lower, Index upper) const {
  AlmostBandedMatrix out(rows_, cols_, lower, upper, r_);
  for (Index i = 0; i < rows_; ++i) {
    double* p = out.row_data(i);
    for (Index j = out.row_begin(i); j < out.row_end(i); ++j) *p++ = get(i, j);
  }
  return out;
}

double AlmostBandedMatrix::max_abs() const {
  double m = 0.0;
  for (double x : band_) m = std::max(m, std::abs(x));
  for (double x : dense_) m = std::max(m, std::abs(x));
  return m;
}

double AlmostBandedMatrix::norm_inf() const {
  double m = 0.0;
  for (Index i = 0; i < rows_; ++i) {
    const double* p = row_data(i);
    double s = 0.0;
    for (Index j = row_begin(i); j < row_end(i); ++j) s += std::abs(*p++);
    m = std::max(m, s);
  }
  return m;
}

namespace {

AlmostBandedMatrix combine(const AlmostBandedMatrix& a, const AlmostBandedMatrix& b, double sign) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::InvalidArgument, "AlmostBandedMatrix sum: shape mismatch");
  AlmostBandedMatrix out = a.restructured(b.lower(), b.upper(), b.dense_rows());
  for (Index i = 0; i < b.rows(); ++i) {
    const double* p = b.row_data(i);
    for (Index j = b.row_begin(i); j < b.row_end(i); ++j) out.add(i, j, sign * *p++);
  }
  return out;
}

}  // namespace

AlmostBandedMatrix operator+(const AlmostBandedMatrix& a, const AlmostBandedMatrix& b) { return combine(a, b, 1.0); }
AlmostBandedMatrix operator-(const AlmostBandedMatrix& a, const AlmostBandedMatrix& b) { return combine(a, b, -1.0); }

AlmostBandedMatrix multiply(const AlmostBandedMatrix& a, const AlmostBandedMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::InvalidArgument, "multiply: inner dimension mismatch");
  const Index dense = b.dense_rows() > 0 ? std::max(a.dense_rows(), b.dense_rows() + a.lower()) : a.dense_rows();
  AlmostBandedMatrix out(a.rows(), b.cols(), a.lower() + b.lower(), a.upper() + b.upper(), dense);
  std::vector<double> acc(static_cast<std::size_t>(b.cols()), 0.0);
  for (Index i = 0; i < a.rows(); ++i) {
    const Index ob = out.row_begin(i), oe = out.row_end(i);
    const double* pa = a.row_data(i);
    Index lo = b.cols(), hi = 0;
    for (Index k = a.row_begin(i); k < a.row_end(i); ++k) {
      const double aik = *pa++;
      if (aik == 0.0) continue;
      const double* pb = b.row_data(k);
      lo = std::min(lo, b.row_begin(k));
      hi = std::max(hi, b.row_end(k));
      for (Index j = b.row_begin(k); j < b.row_end(k); ++j) acc[j] += aik * *pb++;
    }
    double* po = out.row_data(i);
    for (Index j = ob; j < oe; ++j) *po++ = acc[j];
    for (Index j = lo; j < hi; ++j) acc[j] = 0.0;
  }
  return out;
}

}  // namespace specsolve
