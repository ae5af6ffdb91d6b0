#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "favard/banded.hpp"
#include "favard/dense.hpp"
#include "favard/errors.hpp"
#include "favard/poly.hpp"
#include "favard/precision.hpp"

namespace favard {

/// Semi-infinite tridiagonal matrix with diagonal m_n, unit superdiagonal
/// and positive subdiagonal ell_n (entry (n, n-1)), truncated to size().
/// ell[0] holds the conventional ell_0 = 1.
template <class Real = double>
class JacobiMatrix {
 public:
  JacobiMatrix() = default;

  /// diag = m_0..m_{n-1}; sub = ell_1..ell_{n-1}.
  JacobiMatrix(std::vector<Real> diag, const std::vector<Real>& sub) : m_(std::move(diag)) {
    if (m_.empty()) throw std::invalid_argument("JacobiMatrix: empty diagonal");
    if (sub.size() + 1 != m_.size())
      throw std::invalid_argument("JacobiMatrix: expected " + std::to_string(m_.size() - 1) + " subdiagonal entries, got " +
                                  std::to_string(sub.size()));
    ell_.reserve(m_.size());
    ell_.push_back(Real(1));
    for (std::size_t j = 0; j < sub.size(); ++j) {
      if (!(sub[j] > Real(0)))
        throw std::invalid_argument("JacobiMatrix: ell_" + std::to_string(j + 1) + " must be positive");
      ell_.push_back(sub[j]);
    }
  }

  /// Constant coefficients m_n = m, ell_n = ell.
  static JacobiMatrix constant(std::size_t size, Real m, Real ell) {
    return JacobiMatrix(std::vector<Real>(size, m), std::vector<Real>(size - 1, ell));
  }

  /// Reads m and ell from a banded (1,1) matrix whose superdiagonal is one.
  static JacobiMatrix from_banded(const BandedMatrix<Real>& t) {
    if (t.upper_bandwidth() != 1 || t.lower_bandwidth() != 1)
      throw std::invalid_argument("JacobiMatrix::from_banded: expected a tridiagonal matrix");
    for (const Real& v : t.band(1))
      if (v != Real(1)) throw std::invalid_argument("JacobiMatrix::from_banded: superdiagonal must be identically one");
    return JacobiMatrix(t.band(0), t.band(-1));
  }

  std::size_t size() const { return m_.size(); }
  Real m(std::size_t n) const { return m_.at(n); }
  Real ell(std::size_t n) const { return ell_.at(n); }
  const std::vector<Real>& diagonal() const { return m_; }

  BandedMatrix<Real> to_banded() const { return tridiagonal_banded(m_, ell_); }
  DenseMatrix<Real> truncate(std::size_t n) const { return to_banded().truncate(n); }

  void require_order(std::size_t n, std::size_t extra, const char* who) const {
    if (n + extra >= size() + 1)
      throw std::out_of_range(std::string(who) + ": N = " + std::to_string(n) + " needs " + std::to_string(n + extra) +
                              " rows, matrix has " + std::to_string(size()));
  }

 private:
  std::vector<Real> m_;
  std::vector<Real> ell_;
};

template <class Real = double>
struct RecursionPolys {
  std::vector<Poly<Real>> p;  ///< monic P_0 .. P_{N+1}
  std::vector<Real> h;        ///< H_0 .. H_N, H_n = ell_1 ... ell_n
  std::vector<Poly<Real>> q;  ///< left polynomials Q_n = P_n / H_n, n = 0..N
};

/// P_{n+1} = (x - m_n) P_n - ell_n P_{n-1}, P_0 = 1, P_{-1} = 0.
template <class Real>
RecursionPolys<Real> recursion_polys(const JacobiMatrix<Real>& j, std::size_t n) {
  j.require_order(n, 1, "recursion_polys");
  RecursionPolys<Real> out;
  out.p.push_back(Poly<Real>::constant(Real(1)));
  out.h.push_back(Real(1));
  for (std::size_t k = 0; k <= n; ++k) {
    Poly<Real> next = Poly<Real>{-j.m(k), Real(1)} * out.p[k];
    if (k > 0) next -= j.ell(k) * out.p[k - 1];
    out.p.push_back(std::move(next));
    if (k > 0) out.h.push_back(out.h.back() * j.ell(k));
  }
  for (std::size_t k = 0; k <= n; ++k) out.q.push_back(out.p[k] / out.h[k]);
  return out;
}

/// P^{(1)}_{N+1} = det(xI - J^{[N,1]}): the recursion started from
/// P^{(1)}_0 = 0, P^{(1)}_1 = 1 (that is, P^{(1)}_{-1} = -1 so the
/// empty determinant is +1 and the masses come out positive).
template <class Real>
Poly<Real> second_kind(const JacobiMatrix<Real>& j, std::size_t n) {
  j.require_order(n, 1, "second_kind");
  Poly<Real> prev;  // P^{(1)}_0
  Poly<Real> cur = Poly<Real>::constant(Real(1));
  for (std::size_t k = 1; k <= n; ++k) {
    Poly<Real> next = Poly<Real>{-j.m(k), Real(1)} * cur - j.ell(k) * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// P^{[k]}_{N+1} = det(xI - J^{[N,k]}) for k = 0..N+1, by the backward
/// recursion P^{[k]} = (x - m_k) P^{[k+1]} - ell_{k+1} P^{[k+2]}.
template <class Real>
std::vector<Poly<Real>> truncated_polys(const JacobiMatrix<Real>& j, std::size_t n) {
  j.require_order(n, 1, "truncated_polys");
  std::vector<Poly<Real>> out(n + 2);
  out[n + 1] = Poly<Real>::constant(Real(1));
  Poly<Real> after;  // P^{[N+2]} = 0
  for (std::size_t k = n + 1; k-- > 0;) {
    Poly<Real> next = Poly<Real>{-j.m(k), Real(1)} * out[k + 1];
    if (k + 2 <= n + 1) next -= j.ell(k + 1) * out[k + 2];
    out[k] = std::move(next);
  }
  return out;
}

/// P_0..P_{N+1} and their derivatives at a (real or complex) point,
/// evaluated by the recurrence.
template <class Scalar>
struct JacobiValues {
  std::vector<Scalar> p;
  std::vector<Scalar> dp;
};

template <class Real, class Scalar>
JacobiValues<Scalar> evaluate_recursion(const JacobiMatrix<Real>& j, std::size_t n, const Scalar& x) {
  j.require_order(n, 1, "evaluate_recursion");
  JacobiValues<Scalar> v;
  v.p.reserve(n + 2);
  v.dp.reserve(n + 2);
  v.p.push_back(Scalar(1));
  v.dp.push_back(Scalar(0));
  for (std::size_t k = 0; k <= n; ++k) {
    const Scalar pm = k > 0 ? v.p[k - 1] : Scalar(0);
    const Scalar dpm = k > 0 ? v.dp[k - 1] : Scalar(0);
    const Scalar ell = k > 0 ? Scalar(j.ell(k)) : Scalar(0);
    v.p.push_back((x - Scalar(j.m(k))) * v.p[k] - ell * pm);
    v.dp.push_back(v.p[k] + (x - Scalar(j.m(k))) * v.dp[k] - ell * dpm);
  }
  return v;
}

template <class Real, class Scalar>
Scalar evaluate_second_kind(const JacobiMatrix<Real>& j, std::size_t n, const Scalar& x) {
  j.require_order(n, 1, "evaluate_second_kind");
  Scalar prev(0);
  Scalar cur(1);
  for (std::size_t k = 1; k <= n; ++k) {
    const Scalar next = (x - Scalar(j.m(k))) * cur - Scalar(j.ell(k)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

template <class Real = double>
struct JacobiSpectralData {
  std::size_t n = 0;
  std::vector<Real> lambdas;      ///< zeros of P_{N+1}, strictly decreasing
  std::vector<Real> masses;       ///< P^{(1)}_{N+1}(lambda_k) / P'_{N+1}(lambda_k)
  std::vector<Real> christoffel;  ///< sum_{l <= N} P_l(lambda_k)^2 / H_l
  /// max_k |masses_k - 1/christoffel_k| / masses_k
  Real mass_crosscheck = Real(0);
};

/// Eigenvalues of J^{[N]} from the symmetrized tridiagonal matrix
/// H^{-1/2} J H^{1/2} (off-diagonal sqrt(ell_n)), masses by both formulas.
template <class Real>
JacobiSpectralData<Real> spectral_data(const JacobiMatrix<Real>& j, std::size_t n) {
  j.require_order(n, 1, "spectral_data");
  const Eigen::Index dim = static_cast<Eigen::Index>(n + 1);
  DenseVector<Real> diag(dim);
  DenseVector<Real> off(std::max<Eigen::Index>(dim - 1, 0));
  Real scale(0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    diag(i) = j.m(static_cast<std::size_t>(i));
    scale = std::max<Real>(scale, std::abs(diag(i)));
  }
  for (Eigen::Index i = 0; i + 1 < dim; ++i) {
    off(i) = std::sqrt(j.ell(static_cast<std::size_t>(i + 1)));
    scale = std::max<Real>(scale, std::max<Real>(j.ell(static_cast<std::size_t>(i + 1)), Real(1)));
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Real>> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_data: tridiagonal QR did not converge");

  JacobiSpectralData<Real> out;
  out.n = n;
  for (Eigen::Index i = 0; i < dim; ++i) out.lambdas.push_back(es.eigenvalues()(i));
  std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<Real>());
  require_simple(out.lambdas, std::max<Real>(scale, Real(1)), Real(1e-10), "spectral_data");

  // Masses of eigenvectors localized away from row 0 are tiny; the
  // first-kind/second-kind ratio then cancels to about eps / mass, so both
  // formulas are evaluated at Newton-refined eigenvalues in quad precision.
  std::vector<Quad> hs{Quad(1)};
  for (std::size_t k = 1; k <= n; ++k) hs.push_back(hs.back() * Quad(j.ell(k)));

  const Quad qscale(static_cast<double>(scale));
  for (std::size_t i = 0; i < out.lambdas.size(); ++i) {
    Real gap = std::numeric_limits<Real>::infinity();
    if (i > 0) gap = std::min<Real>(gap, out.lambdas[i - 1] - out.lambdas[i]);
    if (i + 1 < out.lambdas.size()) gap = std::min<Real>(gap, out.lambdas[i] - out.lambdas[i + 1]);
    const Quad max_move = std::isfinite(static_cast<double>(gap)) ? Quad(static_cast<double>(gap)) / 4 : qscale;
    const Quad lam = newton_polish(
        Quad(static_cast<double>(out.lambdas[i])),
        [&](const Quad& x) {
          const auto v = evaluate_recursion(j, n, x);
          return std::pair<Quad, Quad>(v.p[n + 1], v.dp[n + 1]);
        },
        qscale, max_move);
    const auto v = evaluate_recursion(j, n, lam);
    const Quad mass = evaluate_second_kind(j, n, lam) / v.dp[n + 1];
    Quad cn(0);
    for (std::size_t l = 0; l <= n; ++l) cn += v.p[l] * v.p[l] / hs[l];
    out.lambdas[i] = static_cast<Real>(lam);
    out.masses.push_back(static_cast<Real>(mass));
    out.christoffel.push_back(static_cast<Real>(cn));
    out.mass_crosscheck =
        std::max<Real>(out.mass_crosscheck, static_cast<Real>(boost::multiprecision::abs(mass - Quad(1) / cn) / boost::multiprecision::abs(mass)));
  }
  return out;
}

template <class Real = double>
struct CdCheck {
  Real lhs = Real(0);
  Real rhs = Real(0);
  Real residual = Real(0);  ///< |lhs - rhs| / sum of |summands|
};

/// sum_{n<=N} P_n(x) P_n(y) / H_n against
/// (P_{N+1}(x) P_N(y) - P_N(x) P_{N+1}(y)) / (H_N (x - y)); for x == y the
/// confluent form (P'_{N+1} P_N - P'_N P_{N+1})(x) / H_N is used.
template <class Real>
CdCheck<Real> cd_check(const JacobiMatrix<Real>& j, std::size_t n, Real x, Real y) {
  const auto vx = evaluate_recursion(j, n, x);
  const auto vy = evaluate_recursion(j, n, y);
  Real h(1);
  CdCheck<Real> out;
  Real abs_sum(0);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) h *= j.ell(k);
    const Real term = vx.p[k] * vy.p[k] / h;
    out.lhs += term;
    abs_sum += std::abs(term);
  }
  if (x == y) out.rhs = (vx.dp[n + 1] * vx.p[n] - vx.dp[n] * vx.p[n + 1]) / h;
  else out.rhs = (vx.p[n + 1] * vy.p[n] - vx.p[n] * vy.p[n + 1]) / (h * (x - y));
  out.residual = std::abs(out.lhs - out.rhs) / std::max<Real>(abs_sum, std::numeric_limits<Real>::min());
  return out;
}

/// Distribution function of the discrete measure sum_k mu_k delta_{lambda_k}:
/// the total mass of the nodes lambda_k <= x (right-continuous, zero below
/// the smallest node, one at and above the largest).
template <class Real>
Real step_function(const JacobiSpectralData<Real>& data, Real x) {
  Real acc(0);
  for (std::size_t k = 0; k < data.lambdas.size(); ++k)
    if (data.lambdas[k] <= x) acc += data.masses[k];
  return acc;
}

template <class Real = double>
struct WeylValue {
  std::complex<Real> value;              ///< P^{(1)}_{N+1}(z) / P_{N+1}(z)
  std::complex<Real> partial_fractions;  ///< sum_k mu_k / (z - lambda_k)
  Real residual = Real(0);               ///< relative difference of the two
};

template <class Real>
WeylValue<Real> weyl(const JacobiMatrix<Real>& j, std::size_t n, std::complex<Real> z,
                     const JacobiSpectralData<Real>& data) {
  using Complex = std::complex<Real>;
  Real scale(1);
  for (const Real& l : data.lambdas) scale = std::max<Real>(scale, std::abs(l));
  for (const Real& l : data.lambdas)
    if (std::abs(z - Complex(l)) < Real(1e-12) * scale)
      throw PoleProximity("weyl: z lies on an eigenvalue of J^[N]");
  const auto v = evaluate_recursion(j, n, z);
  WeylValue<Real> out;
  out.value = evaluate_second_kind(j, n, z) / v.p[n + 1];
  out.partial_fractions = Complex(0);
  for (std::size_t k = 0; k < data.lambdas.size(); ++k) out.partial_fractions += data.masses[k] / (z - Complex(data.lambdas[k]));
  out.residual = std::abs(out.value - out.partial_fractions) / std::max<Real>(std::abs(out.value), std::numeric_limits<Real>::min());
  return out;
}

template <class Real>
WeylValue<Real> weyl(const JacobiMatrix<Real>& j, std::size_t n, std::complex<Real> z) {
  return weyl(j, n, z, spectral_data(j, n));
}

}  // namespace favard
