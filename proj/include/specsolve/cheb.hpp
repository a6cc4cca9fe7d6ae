#pragma once

// Chebyshev grids, transforms, Clenshaw evaluation, adaptive approximation and
// quadrature weights.  Everything here is templated on the scalar type so the
// same code runs in double and in extended-precision verification builds; the
// double instantiation switches to FFT-based transforms for large sizes.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "specsolve/error.hpp"

namespace specsolve {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
inline Scalar pi_v() {
  using std::acos;
  return acos(Scalar(-1));
}

/// Polynomial basis tag: Chebyshev T_j, or ultraspherical C_j^{(k)} with integer k >= 1.
struct Basis {
  enum class Kind { ChebyshevT, Ultraspherical };
  Kind kind = Kind::ChebyshevT;
  int level = 0;  // k for C^{(k)}, 0 for Chebyshev

  static constexpr Basis chebyshev() { return {Kind::ChebyshevT, 0}; }
  static Basis ultraspherical(int k) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "ultraspherical level must be >= 1");
    return {Kind::Ultraspherical, k};
  }
  /// Range basis of the k-th derivative / conversion chain: T for k = 0, C^{(k)} otherwise.
  static Basis level_basis(int k) { return k == 0 ? chebyshev() : ultraspherical(k); }

  bool operator==(const Basis&) const = default;
  std::string name() const {
    return kind == Kind::ChebyshevT ? std::string("T") : "C(" + std::to_string(level) + ")";
  }
};

template <class Scalar>
struct ChebSeries {
  Vec<Scalar> coeffs;
  Basis basis = Basis::chebyshev();

  ChebSeries() : coeffs(Vec<Scalar>::Zero(1)) {}
  explicit ChebSeries(Vec<Scalar> c, Basis b = Basis::chebyshev()) : coeffs(std::move(c)), basis(b) {
    if (coeffs.size() == 0) throw Error(ErrorKind::InvalidArgument, "ChebSeries needs at least one coefficient");
  }

  Eigen::Index size() const { return coeffs.size(); }
  Eigen::Index degree() const { return coeffs.size() - 1; }

  /// Drops trailing exact zeros (keeps at least one coefficient).
  ChebSeries trimmed() const {
    Eigen::Index n = coeffs.size();
    while (n > 1 && coeffs[n - 1] == Scalar(0)) --n;
    return ChebSeries(coeffs.head(n), basis);
  }

  /// Coefficients zero-padded or cut to length n.
  Vec<Scalar> padded(Eigen::Index n) const {
    Vec<Scalar> out = Vec<Scalar>::Zero(n);
    const Eigen::Index k = std::min(n, coeffs.size());
    out.head(k) = coeffs.head(k);
    return out;
  }

  bool is_zero() const { return (coeffs.array() == Scalar(0)).all(); }
};

enum class GridKind { GaussLobatto, Gauss };

template <class Scalar>
struct Grid {
  GridKind kind = GridKind::GaussLobatto;
  Vec<Scalar> points;

  Eigen::Index size() const { return points.size(); }
  Scalar operator[](Eigen::Index i) const { return points[i]; }
};

/// n+1 ascending Chebyshev points: extremes (GaussLobatto) or roots (Gauss).
template <class Scalar = double>
Grid<Scalar> cheb_points(int n, GridKind kind) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "cheb_points needs n >= 1");
  using std::sin;
  Grid<Scalar> g;
  g.kind = kind;
  g.points.resize(n + 1);
  const Scalar pi = pi_v<Scalar>();
  // sin form of -cos(.) keeps the points exactly symmetric about 0
  for (int j = 0; j <= n; ++j) {
    if (kind == GridKind::GaussLobatto)
      g.points[j] = sin(pi * Scalar(2 * j - n) / Scalar(2 * n));
    else
      g.points[j] = sin(pi * Scalar(2 * j - n) / Scalar(2 * n + 2));
  }
  return g;
}

namespace detail {

// FFT-backed transforms (double only); values are in ascending point order.
Vec<double> lobatto_vals_to_coeffs_fft(const Vec<double>& values);
Vec<double> lobatto_coeffs_to_vals_fft(const Vec<double>& coeffs);
Vec<double> gauss_vals_to_coeffs_fft(const Vec<double>& values);
Vec<double> gauss_coeffs_to_vals_fft(const Vec<double>& coeffs);

inline constexpr Eigen::Index kFftThreshold = 64;

/// cos(pi * num / den) with num reduced mod 2*den, so large products stay accurate.
template <class Scalar>
Scalar cos_pi_ratio(std::int64_t num, std::int64_t den) {
  using std::cos;
  std::int64_t r = num % (2 * den);
  if (r < 0) r += 2 * den;
  return cos(pi_v<Scalar>() * Scalar(r) / Scalar(den));
}

}  // namespace detail

/// Chebyshev coefficients of the interpolant through values at the ascending
/// (values.size())-point GaussLobatto grid.
template <class Scalar>
Vec<Scalar> vals_to_coeffs(const Vec<Scalar>& values) {
  const Eigen::Index len = values.size();
  if (len == 0) throw Error(ErrorKind::InvalidArgument, "vals_to_coeffs: empty input");
  if (len == 1) return values;
  if constexpr (std::is_same_v<Scalar, double>) {
    if (len > detail::kFftThreshold) return detail::lobatto_vals_to_coeffs_fft(values);
  }
  const Eigen::Index n = len - 1;
  Vec<Scalar> c = Vec<Scalar>::Zero(len);
  for (Eigen::Index k = 0; k <= n; ++k) {
    Scalar acc(0);
    for (Eigen::Index j = 0; j <= n; ++j) {
      // ascending point j equals descending point n - j
      const Scalar gj = (j == 0 || j == n) ? Scalar(0.5) : Scalar(1);
      acc += gj * values[n - j] * detail::cos_pi_ratio<Scalar>(j * k, n);
    }
    const Scalar gk = (k == 0 || k == n) ? Scalar(0.5) : Scalar(1);
    c[k] = Scalar(2) * gk * acc / Scalar(n);
  }
  return c;
}

/// Values of the interpolant on an ascending Gauss grid of values.size() points -> coefficients.
template <class Scalar>
Vec<Scalar> gauss_vals_to_coeffs(const Vec<Scalar>& values) {
  const Eigen::Index K = values.size();
  if (K == 0) throw Error(ErrorKind::InvalidArgument, "gauss_vals_to_coeffs: empty input");
  if constexpr (std::is_same_v<Scalar, double>) {
    if (K > detail::kFftThreshold) return detail::gauss_vals_to_coeffs_fft(values);
  }
  Vec<Scalar> c(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    Scalar acc(0);
    for (Eigen::Index j = 0; j < K; ++j)
      acc += values[K - 1 - j] * detail::cos_pi_ratio<Scalar>(k * (2 * j + 1), 2 * K);
    c[k] = (k == 0 ? Scalar(1) : Scalar(2)) * acc / Scalar(K);
  }
  return c;
}

template <class Scalar>
Scalar clenshaw_unchecked(const ChebSeries<Scalar>& s, const Scalar& x) {
  const Eigen::Index n = s.coeffs.size();
  Scalar b1(0), b2(0);
  if (s.basis.kind == Basis::Kind::ChebyshevT) {
    for (Eigen::Index j = n - 1; j >= 1; --j) {
      const Scalar b0 = s.coeffs[j] + Scalar(2) * x * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return s.coeffs[0] + x * b1 - b2;
  }
  // C^{(k)}: p_{j+1} = alpha_j p_j - beta_j p_{j-1},
  // alpha_j = 2 (j+k) x / (j+1), beta_j = (j+2k-1)/(j+1)
  const Scalar k(s.basis.level);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const Scalar alpha = Scalar(2) * (Scalar(j) + k) * x / Scalar(j + 1);
    const Scalar beta_next = (Scalar(j + 1) + Scalar(2) * k - Scalar(1)) / Scalar(j + 2);
    const Scalar b0 = s.coeffs[j] + alpha * b1 - beta_next * b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

/// Evaluates the series at x in [-1, 1] by Clenshaw's recurrence for the tagged basis.
template <class Scalar>
Scalar clenshaw_eval(const ChebSeries<Scalar>& s, const Scalar& x) {
  using std::abs;
  if (!(abs(x) <= Scalar(1))) throw Error(ErrorKind::DomainError, "clenshaw_eval: |x| > 1");
  return clenshaw_unchecked(s, x);
}

/// Values of the series at each grid point.
template <class Scalar>
Vec<Scalar> coeffs_to_vals(const ChebSeries<Scalar>& s, const Grid<Scalar>& grid) {
  const Eigen::Index npts = grid.size();
  if constexpr (std::is_same_v<Scalar, double>) {
    if (s.basis.kind == Basis::Kind::ChebyshevT && npts > detail::kFftThreshold && s.size() <= npts) {
      if (grid.kind == GridKind::GaussLobatto) return detail::lobatto_coeffs_to_vals_fft(s.padded(npts));
      return detail::gauss_coeffs_to_vals_fft(s.padded(npts));
    }
  }
  Vec<Scalar> out(npts);
  for (Eigen::Index i = 0; i < npts; ++i) out[i] = clenshaw_eval(s, grid.points[i]);
  return out;
}

/// E(i, j) = T_j(x_i).
template <class Scalar>
Mat<Scalar> chebyshev_vandermonde(const Vec<Scalar>& points, Eigen::Index ncoeffs) {
  Mat<Scalar> e(points.size(), ncoeffs);
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const Scalar x = points[i];
    if (ncoeffs > 0) e(i, 0) = Scalar(1);
    if (ncoeffs > 1) e(i, 1) = x;
    for (Eigen::Index j = 2; j < ncoeffs; ++j) e(i, j) = Scalar(2) * x * e(i, j - 1) - e(i, j - 2);
  }
  return e;
}

/// Clenshaw-Curtis weights on the ascending (n+1)-point GaussLobatto grid.
template <class Scalar = double>
Vec<Scalar> cc_weights(int n);

/// Row r with r . c = integral over [-1, 1] of sum_j c_j T_j.
template <class Scalar = double>
Vec<Scalar> integral_functional_row(Eigen::Index n) {
  Vec<Scalar> r = Vec<Scalar>::Zero(n);
  for (Eigen::Index j = 0; j < n; j += 2) r[j] = Scalar(2) / Scalar(1 - j * j);
  return r;
}

template <class Scalar>
Vec<Scalar> cc_weights(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "cc_weights needs n >= 1");
  // The DCT-I matrix is symmetric, so w = V^T I is the transform of the reversed integral row.
  Vec<Scalar> row = integral_functional_row<Scalar>(n + 1);
  Vec<Scalar> w = vals_to_coeffs<Scalar>(row.reverse().eval());
  return w.reverse().eval();
}

/// Chebyshev coefficients of the derivative of a T-series.
template <class Scalar>
Vec<Scalar> cheb_derivative(const Vec<Scalar>& c) {
  const Eigen::Index n = c.size();
  if (n <= 1) return Vec<Scalar>::Zero(1);
  Vec<Scalar> d = Vec<Scalar>::Zero(n);  // one spare slot for the recurrence
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    d[k - 1] = (k + 1 < n ? d[k + 1] : Scalar(0)) + Scalar(2 * k) * c[k];
  }
  d[0] /= Scalar(2);
  return d.head(n - 1);
}

/// Chebyshev coefficients of x^j, returned with length n (requires n > j).
template <class Scalar>
Vec<Scalar> monomial_coeffs(int j, Eigen::Index n) {
  if (n <= j) throw Error(ErrorKind::InvalidArgument, "monomial_coeffs: length too short");
  Vec<Scalar> c = Vec<Scalar>::Zero(n);
  c[0] = Scalar(1);
  for (int p = 0; p < j; ++p) {
    // x T_0 = T_1, x T_k = (T_{k+1} + T_{k-1}) / 2
    Vec<Scalar> next = Vec<Scalar>::Zero(n);
    for (int k = 0; k <= p; ++k) {
      if (c[k] == Scalar(0)) continue;
      if (k == 0) {
        next[1] += c[0];
      } else {
        next[k + 1] += c[k] / Scalar(2);
        next[k - 1] += c[k] / Scalar(2);
      }
    }
    c = next;
  }
  return c;
}

/// C^{(k)}_j(x) for j = 0..n-1 (k >= 1) by the three-term recurrence.
template <class Scalar>
Vec<Scalar> ultraspherical_values(int k, const Scalar& x, Eigen::Index n) {
  Vec<Scalar> v = Vec<Scalar>::Zero(n);
  if (n > 0) v[0] = Scalar(1);
  if (n > 1) v[1] = Scalar(2 * k) * x;
  for (Eigen::Index j = 1; j + 1 < n; ++j)
    v[j + 1] = (Scalar(2) * Scalar(j + k) * x * v[j] - Scalar(j + 2 * k - 1) * v[j - 1]) / Scalar(j + 1);
  return v;
}

struct AdaptiveOptions {
  double tol = 1e-14;
  int min_log2 = 4;
  int max_log2 = 18;
  // f gets the points in long double; sampling a steep function at
  // double-rounded points leaves a noise floor of ~eps * |x f'(x)|
  bool long_double_points = false;
};

/// Samples f on GaussLobatto grids of 2^k + 1 points, k = min_log2..max_log2, and
/// returns the chopped coefficients of the first grid whose last three
/// coefficients all fall below tol * max|c|.
template <class Fn>
ChebSeries<double> adaptive_approx(Fn&& f, AdaptiveOptions opts = {}) {
  if (!(opts.tol > 0)) throw Error(ErrorKind::InvalidArgument, "adaptive_approx: tol must be positive");
  for (int k = opts.min_log2; k <= opts.max_log2; ++k) {
    const int n = 1 << k;
    Vec<double> vals(n + 1);
    auto sample = [&](const auto& g) {
      for (int j = 0; j <= n; ++j) {
        vals[j] = static_cast<double>(f(g.points[j]));
        if (!std::isfinite(vals[j]))
          throw Error(ErrorKind::DomainError,
                      "function not finite at x = " + std::to_string(static_cast<double>(g.points[j])));
      }
    };
    if (opts.long_double_points)
      sample(cheb_points<long double>(n, GridKind::GaussLobatto));
    else
      sample(cheb_points<double>(n, GridKind::GaussLobatto));
    Vec<double> c = vals_to_coeffs<double>(vals);
    const double cmax = c.cwiseAbs().maxCoeff();
    if (cmax == 0.0) return ChebSeries<double>(Vec<double>::Zero(1));
    const double cut = opts.tol * cmax;
    if (std::abs(c[n]) < cut && std::abs(c[n - 1]) < cut && std::abs(c[n - 2]) < cut) {
      Eigen::Index last = n;
      while (last > 0 && std::abs(c[last]) < cut) --last;
      return ChebSeries<double>(c.head(last + 1));
    }
  }
  throw Error(ErrorKind::ResolutionFailure,
              "adaptive_approx: no convergence by 2^" + std::to_string(opts.max_log2) + "+1 points");
}

inline ChebSeries<double> adaptive_approx(const auto& f, double tol) {
  AdaptiveOptions o;
  o.tol = tol;
  return adaptive_approx(f, o);
}

}  // namespace specsolve
