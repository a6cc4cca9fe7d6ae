#include "specsolve/fast_operator.hpp"

#include <unsupported/Eigen/FFT>

namespace specsolve {

namespace {

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::complex<double>> forward(const std::vector<double>& x) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, x);
  return out;
}

std::vector<double> inverse_real(const std::vector<std::complex<double>>& x) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.inv(out, x);
  std::vector<double> re(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) re[i] = out[i].real();
  return re;
}

}  // namespace

ToeplitzHankel::ToeplitzHankel(Index rows, Index cols, VectorXd toeplitz, VectorXd hankel, Index hankel_first_row)
    : rows_(rows), cols_(cols), hankel_first_row_(hankel_first_row), toeplitz_(std::move(toeplitz)), hankel_(std::move(hankel)) {
  if (toeplitz_.size() != rows + cols - 1 || hankel_.size() != rows + cols - 1)
    throw Error(ErrorKind::InvalidArgument, "ToeplitzHankel: symbol lengths must be rows + cols - 1");
  fft_size_ = next_pow2(rows + 2 * cols - 1);
  std::vector<double> t(fft_size_, 0.0), h(fft_size_, 0.0);
  for (Index s = 0; s < toeplitz_.size(); ++s) t[s] = toeplitz_[s];
  // zero the Hankel symbol entries that only feed suppressed rows
  for (Index s = 0; s < hankel_.size(); ++s) h[s] = hankel_[s];
  toeplitz_hat_ = forward(t);
  hankel_hat_ = forward(h);
}

ToeplitzHankel ToeplitzHankel::chebyshev_multiplication(const ChebSeries<double>& a, Index rows, Index cols) {
  if (a.basis != Basis::chebyshev()) throw Error(ErrorKind::BasisMismatch, "M_0[a] needs a Chebyshev series");
  const VectorXd& c = a.coeffs;
  auto coef = [&](Index s) { return s < c.size() ? c[s] : 0.0; };
  VectorXd t(rows + cols - 1), h(rows + cols - 1);
  for (Index s = 0; s < t.size(); ++s) {
    const Index diff = s - (cols - 1);
    const Index ad = diff < 0 ? -diff : diff;
    t[s] = ad == 0 ? coef(0) : 0.5 * coef(ad);
    h[s] = 0.5 * coef(s);
  }
  return ToeplitzHankel(rows, cols, std::move(t), std::move(h), 1);
}

double ToeplitzHankel::entry(Index i, Index j) const {
  double v = toeplitz_[i - j + cols_ - 1];
  if (i >= hankel_first_row_) v += hankel_[i + j];
  return v;
}

VectorXd ToeplitzHankel::apply(const VectorXd& v) const {
  if (v.size() != cols_) throw Error(ErrorKind::InvalidArgument, "ToeplitzHankel::apply: size mismatch");
  std::vector<double> x(fft_size_, 0.0), xr(fft_size_, 0.0);
  for (Index j = 0; j < cols_; ++j) {
    x[j] = v[j];
    xr[cols_ - 1 - j] = v[j];
  }
  auto xh = forward(x);
  auto xrh = forward(xr);
  for (Index k = 0; k < fft_size_; ++k) {
    xh[k] *= toeplitz_hat_[k];
    xrh[k] *= hankel_hat_[k];
  }
  const auto yt = inverse_real(xh);
  const auto yh = inverse_real(xrh);
  VectorXd out(rows_);
  for (Index i = 0; i < rows_; ++i) {
    out[i] = yt[i + cols_ - 1];
    if (i >= hankel_first_row_) out[i] += yh[i + cols_ - 1];
  }
  return out;
}

VectorXd ToeplitzHankel::apply_reference(const VectorXd& v) const {
  VectorXd out(rows_);
  for (Index i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < cols_; ++j) acc += entry(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

void FastOperator::set_top_rows(RowMatrixXd top) {
  if (top.rows() > 0 && top.cols() != cols_) throw Error(ErrorKind::InvalidArgument, "FastOperator: top row width");
  top_ = std::move(top);
}

void FastOperator::add_term(FastTerm term) {
  Index in = cols_;
  if (term.right) {
    if (term.right->cols() != in) throw Error(ErrorKind::InvalidArgument, "FastOperator: right factor shape");
    in = term.right->rows();
  }
  if (term.middle) {
    if (term.middle->cols() != in) throw Error(ErrorKind::InvalidArgument, "FastOperator: middle factor shape");
    in = term.middle->rows();
  }
  if (term.left) {
    if (term.left->cols() != in) throw Error(ErrorKind::InvalidArgument, "FastOperator: left factor shape");
    in = term.left->rows();
  }
  if (in != body_rows()) throw Error(ErrorKind::InvalidArgument, "FastOperator: term output size");
  terms_.push_back(std::move(term));
}

void FastOperator::set_low_rank(MatrixXd u, MatrixXd v) {
  if (u.rows() != body_rows() || v.cols() != cols_ || u.cols() != v.rows())
    throw Error(ErrorKind::InvalidArgument, "FastOperator: low-rank shape");
  low_u_ = std::move(u);
  low_v_ = std::move(v);
}

void FastOperator::set_column_scaling(VectorXd s) {
  if (s.size() != cols_) throw Error(ErrorKind::InvalidArgument, "FastOperator: scaling length");
  col_scale_ = std::move(s);
}

template <class ApplyTh>
VectorXd FastOperator::apply_impl(const VectorXd& v_in, ApplyTh&& th) const {
  if (v_in.size() != cols_) throw Error(ErrorKind::InvalidArgument, "FastOperator::apply: size mismatch");
  const VectorXd v = col_scale_.size() ? VectorXd(col_scale_.cwiseProduct(v_in)) : v_in;
  VectorXd out = VectorXd::Zero(rows_);
  const Index r = top_.rows();
  if (r > 0) out.head(r) = top_ * v;
  auto body = out.tail(rows_ - r);
  for (const FastTerm& t : terms_) {
    VectorXd w = t.right ? t.right->matvec(v) : v;
    if (t.middle) w = th(*t.middle, w);
    if (t.left) w = t.left->matvec(w);
    body += t.scale * w;
  }
  if (low_u_.size()) body += low_u_ * (low_v_ * v);
  return out;
}

VectorXd FastOperator::apply(const VectorXd& v) const {
  return apply_impl(v, [](const ToeplitzHankel& m, const VectorXd& w) { return m.apply(w); });
}

VectorXd FastOperator::apply_reference(const VectorXd& v) const {
  return apply_impl(v, [](const ToeplitzHankel& m, const VectorXd& w) { return m.apply_reference(w); });
}

MatrixXd FastOperator::to_dense() const {
  MatrixXd out(rows_, cols_);
  VectorXd e = VectorXd::Zero(cols_);
  for (Index j = 0; j < cols_; ++j) {
    e[j] = 1.0;
    out.col(j) = apply(e);
    e[j] = 0.0;
  }
  return out;
}

}  // namespace specsolve
