#include "specsolve/cheb.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <numbers>

namespace specsolve::detail {

namespace {

std::vector<std::complex<double>> fft_forward(const std::vector<double>& in) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  return out;
}

}  // namespace

Vec<double> lobatto_vals_to_coeffs_fft(const Vec<double>& values) {
  const Eigen::Index n = values.size() - 1;
  // even extension of the descending-order samples
  std::vector<double> ext(2 * n);
  for (Eigen::Index j = 0; j <= n; ++j) ext[j] = values[n - j];
  for (Eigen::Index j = n + 1; j < 2 * n; ++j) ext[j] = ext[2 * n - j];
  const auto spec = fft_forward(ext);
  Vec<double> c(n + 1);
  for (Eigen::Index k = 0; k <= n; ++k) c[k] = spec[k].real() / static_cast<double>(n);
  c[0] *= 0.5;
  c[n] *= 0.5;
  return c;
}

Vec<double> lobatto_coeffs_to_vals_fft(const Vec<double>& coeffs) {
  const Eigen::Index n = coeffs.size() - 1;
  std::vector<double> ext(2 * n);
  ext[0] = 2.0 * coeffs[0];
  ext[n] = 2.0 * coeffs[n];
  for (Eigen::Index k = 1; k < n; ++k) ext[k] = ext[2 * n - k] = coeffs[k];
  const auto spec = fft_forward(ext);
  Vec<double> v(n + 1);
  for (Eigen::Index j = 0; j <= n; ++j) v[n - j] = 0.5 * spec[j].real();
  return v;
}

Vec<double> gauss_vals_to_coeffs_fft(const Vec<double>& values) {
  const Eigen::Index K = values.size();
  std::vector<double> ext(2 * K);
  for (Eigen::Index j = 0; j < K; ++j) {
    ext[j] = values[K - 1 - j];
    ext[2 * K - 1 - j] = ext[j];
  }
  const auto spec = fft_forward(ext);
  Vec<double> c(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const std::complex<double> tw = std::polar(1.0, -std::numbers::pi * static_cast<double>(k) / (2.0 * K));
    const double s = 0.5 * (tw * spec[k]).real();
    c[k] = (k == 0 ? 1.0 : 2.0) * s / static_cast<double>(K);
  }
  return c;
}

Vec<double> gauss_coeffs_to_vals_fft(const Vec<double>& coeffs) {
  const Eigen::Index K = coeffs.size();
  std::vector<std::complex<double>> z(2 * K, {0.0, 0.0});
  for (Eigen::Index k = 0; k < K; ++k)
    z[k] = coeffs[k] * std::polar(1.0, std::numbers::pi * static_cast<double>(k) / (2.0 * K));
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<std::complex<double>> out;
  fft.inv(out, z);
  Vec<double> v(K);
  for (Eigen::Index j = 0; j < K; ++j) v[K - 1 - j] = out[j].real();
  return v;
}

}  // namespace specsolve::detail
