#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "favard/banded.hpp"
#include "favard/dense.hpp"
#include "favard/errors.hpp"
#include "favard/mixed.hpp"
#include "favard/precision.hpp"

namespace favard {

namespace detail {

template <class W, class Real>
DenseMatrix<W> inverse_as(const DenseMatrix<Real>& m) {
  return DenseMatrix<W>(m.template cast<W>()).inverse();
}

/// Partial-pivot LU of a square complex matrix held row-major. Works for
/// std::complex and the Boost multiprecision complex types.
template <class C>
class ComplexLu {
 public:
  ComplexLu(std::vector<C> a, std::size_t n) : a_(std::move(a)), n_(n), perm_(n) {
    using std::abs;
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t piv = k;
      auto best = abs(at(k, k));
      for (std::size_t i = k + 1; i < n_; ++i)
        if (abs(at(i, k)) > best) {
          best = abs(at(i, k));
          piv = i;
        }
      if (best == decltype(best)(0)) {
        singular_ = true;
        continue;
      }
      if (piv != k) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(at(k, j), at(piv, j));
        std::swap(perm_[k], perm_[piv]);
        odd_ = !odd_;
      }
      for (std::size_t i = k + 1; i < n_; ++i) {
        const C f = at(i, k) / at(k, k);
        at(i, k) = f;
        for (std::size_t j = k + 1; j < n_; ++j) at(i, j) -= f * at(k, j);
      }
    }
  }

  C determinant() const {
    if (singular_) return C(0);
    C d(odd_ ? -1 : 1);
    for (std::size_t k = 0; k < n_; ++k) d *= at(k, k);
    return d;
  }

  bool singular() const { return singular_; }

  std::vector<C> solve(const std::vector<C>& b) const {
    if (singular_) throw PoleProximity("complex solve: matrix is singular");
    std::vector<C> x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      C acc = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) acc -= at(i, j) * x[j];
      x[i] = acc;
    }
    for (std::size_t i = n_; i-- > 0;) {
      C acc = x[i];
      for (std::size_t j = i + 1; j < n_; ++j) acc -= at(i, j) * x[j];
      x[i] = acc / at(i, i);
    }
    return x;
  }

 private:
  C& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const C& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  std::vector<C> a_;
  std::size_t n_;
  std::vector<std::size_t> perm_;
  bool odd_ = false;
  bool singular_ = false;
};

/// z I - T^{[N]}, row-major, with rows and columns in `skip` removed.
template <class C, class Real>
std::vector<C> shifted_truncation(const DenseMatrix<Real>& t, const C& z, std::size_t skip_row = std::size_t(-1),
                                  std::size_t skip_col = std::size_t(-1)) {
  std::vector<C> out;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (static_cast<std::size_t>(i) == skip_row) continue;
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      if (static_cast<std::size_t>(j) == skip_col) continue;
      C v = C(-t(i, j));
      if (i == j) v += z;
      out.push_back(v);
    }
  }
  return out;
}

/// Complex p x q block, stored row-major, times real matrices on both sides.
template <class C, class W>
std::vector<C> sandwich(const DenseMatrix<W>& left, const std::vector<C>& mid, const DenseMatrix<W>& right, std::size_t p,
                        std::size_t q) {
  std::vector<C> tmp(p * q, C(0)), out(p * q, C(0));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t j = 0; j < q; ++j)
        tmp[i * q + j] += C(left(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))) * mid[k * q + j];
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < q; ++k)
        out[i * q + j] += tmp[i * q + k] * C(right(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
  return out;
}

template <class C>
auto max_abs_of(const std::vector<C>& v) {
  using std::abs;
  decltype(abs(C(0))) m(0);
  for (const C& c : v) m = std::max(m, decltype(m)(abs(c)));
  return m;
}

template <class C>
auto relative_gap(const std::vector<C>& a, const std::vector<C>& b) {
  using R = decltype(max_abs_of(a));
  std::vector<C> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const R scale = std::max<R>(max_abs_of(a), std::numeric_limits<R>::min());
  return R(max_abs_of(d) / scale);
}

template <class Real, class C>
DenseMatrix<std::complex<Real>> to_std(const std::vector<C>& v, std::size_t p, std::size_t q) {
  DenseMatrix<std::complex<Real>> m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      const C& c = v[i * q + j];
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::complex<Real>(static_cast<Real>(c.real()), static_cast<Real>(c.imag()));
    }
  return m;
}

inline void require_mixed(std::size_t upper, std::size_t lower, const char* who) {
  if (upper != 2 || lower != 3)
    throw std::invalid_argument(std::string(who) + ": expected 2 superdiagonals and 3 subdiagonals");
}

}  // namespace detail

/// Psi_0 .. Psi_{count-1} with Psi_n = xi^{-1} E_p T^n E_q^T nu^{-T} (p x q),
/// computed in W on the truncation of size p (count - 1) + q. A power of
/// order n started from the first p rows only reaches column p n + p - 1,
/// so that truncation gives the exact top-left block.
template <class W, class Real>
std::vector<DenseMatrix<W>> moment_sequence_as(const BandedMatrix<Real>& t, std::size_t count, const DenseMatrix<Real>& nu,
                                               const DenseMatrix<Real>& xi) {
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  detail::check_start_matrix(nu, q, "nu");
  detail::check_start_matrix(xi, p, "xi");
  std::vector<DenseMatrix<W>> out;
  if (count == 0) return out;
  const std::size_t size = p * (count - 1) + q;
  detail::require_size(t.size(), size, "moments");
  const DenseMatrix<W> xi_inv = detail::inverse_as<W>(xi);
  const DenseMatrix<W> nu_inv_t = detail::inverse_as<W>(nu).transpose();
  const auto ip = static_cast<Eigen::Index>(p);
  const auto iq = static_cast<Eigen::Index>(q);
  DenseMatrix<W> rows = DenseMatrix<W>::Identity(ip, static_cast<Eigen::Index>(size));
  for (std::size_t n = 0; n < count; ++n) {
    out.push_back(xi_inv * rows.leftCols(iq) * nu_inv_t);
    if (n + 1 == count) break;
    DenseMatrix<W> next = DenseMatrix<W>::Zero(ip, static_cast<Eigen::Index>(size));
    for (std::size_t c = 0; c < size; ++c) {
      const std::size_t lo = c >= p ? c - p : 0;
      const std::size_t hi = std::min(size - 1, c + q);
      for (std::size_t r = lo; r <= hi; ++r) {
        const W v = W(t(r, c));
        if (v == W(0)) continue;
        for (Eigen::Index i = 0; i < ip; ++i)
          next(i, static_cast<Eigen::Index>(c)) += rows(i, static_cast<Eigen::Index>(r)) * v;
      }
    }
    rows = std::move(next);
  }
  return out;
}

/// Psi_n, rounded to Real.
template <class Real>
DenseMatrix<Real> moments_from_T(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& nu,
                                 const DenseMatrix<Real>& xi) {
  return moment_sequence_as<work_t<Real>>(t, n + 1, nu, xi).back().template cast<Real>();
}

template <class Real>
DenseMatrix<Real> moments_from_T(const BandedMatrix<Real>& t, std::size_t n, const InitialConditions<Real>& ic = {}) {
  detail::require_mixed(t.upper_bandwidth(), t.lower_bandwidth(), "moments_from_T");
  return moments_from_T(t, n, ic.nu(), ic.xi());
}

/// Scalar n x n truncation of the block-Hankel moment matrix,
///   M(p j + b - 1, q k + a - 1) = (Psi_{j+k})_{b,a}.
template <class Real = double>
struct MomentMatrix {
  std::size_t n = 0;
  std::size_t upper = 2;
  std::size_t lower = 3;
  DenseMatrix<Real> entries;
  std::vector<DenseMatrix<Real>> psi;  ///< the moments used, Psi_0 ..
};

namespace detail {

template <class W>
DenseMatrix<W> interleave(const std::vector<DenseMatrix<W>>& psi, std::size_t n, std::size_t p, std::size_t q) {
  DenseMatrix<W> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          psi[r / p + c / q](static_cast<Eigen::Index>(r % p), static_cast<Eigen::Index>(c % q));
  return m;
}

inline std::size_t moments_needed(std::size_t n, std::size_t p, std::size_t q) {
  return n == 0 ? 0 : (n - 1) / p + (n - 1) / q + 1;
}

}  // namespace detail

template <class Real>
MomentMatrix<Real> moment_matrix(const BandedMatrix<Real>& t, const DenseMatrix<Real>& nu, const DenseMatrix<Real>& xi,
                                 std::size_t n) {
  using W = work_t<Real>;
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  const auto psi = moment_sequence_as<W>(t, detail::moments_needed(n, p, q), nu, xi);
  MomentMatrix<Real> out;
  out.n = n;
  out.upper = p;
  out.lower = q;
  out.entries = detail::interleave(psi, n, p, q).template cast<Real>();
  for (const auto& m : psi) out.psi.push_back(m.template cast<Real>());
  return out;
}

template <class Real>
MomentMatrix<Real> moment_matrix(const BandedMatrix<Real>& t, const InitialConditions<Real>& ic, std::size_t n) {
  detail::require_mixed(t.upper_bandwidth(), t.lower_bandwidth(), "moment_matrix");
  return moment_matrix(t, ic.nu(), ic.xi(), n);
}

template <class Real = double>
struct GaussBorel {
  std::size_t n = 0;
  /// Row m: coefficient of x^j of B^b_m at column p j + b - 1.
  DenseMatrix<Real> bmat;
  /// Column m: coefficient of x^j of A^a_m at row q j + a - 1.
  DenseMatrix<Real> amat;
  Real residual = Real(0);            ///< ||B M A - I||_max for the factorization
  Real recursion_residual = Real(0);  ///< the same with the recursion coefficients
  Real recursion_mismatch = Real(0);  ///< factorization vs recursion, relative per row / column
  Real min_pivot = Real(0);           ///< smallest |pivot| / max entry of its leading block
};

/// Coefficient matrices of the recursion families (rows of B, columns of A).
template <class W, class Real>
std::pair<DenseMatrix<W>, DenseMatrix<W>> recursion_coefficients(const BandedMatrix<Real>& t, std::size_t n,
                                                                 const DenseMatrix<Real>& nu, const DenseMatrix<Real>& xi) {
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  const auto in = static_cast<Eigen::Index>(n);
  DenseMatrix<W> bm = DenseMatrix<W>::Zero(in, in), am = DenseMatrix<W>::Zero(in, in);
  if (n == 0) return {bm, am};
  const BandedMatrix<W> tw = t.template cast<W>();
  const auto fb = type_two_family<Poly<W>>(tw, DenseMatrix<W>(xi.template cast<W>()), n - 1, detail::Indeterminate{});
  const auto fa = type_one_family<Poly<W>>(tw, DenseMatrix<W>(nu.template cast<W>()), n - 1, detail::Indeterminate{});
  auto place = [n](const auto& fam, std::size_t width, auto&& put) {
    for (std::size_t f = 0; f < width; ++f)
      for (std::size_t m = 0; m < n; ++m) {
        const auto& c = fam[f][m].coeffs();
        for (std::size_t j = 0; j < c.size(); ++j) {
          const std::size_t idx = width * j + f;
          if (idx > m)
            throw NumericalError("gauss_borel: recursion polynomial " + std::to_string(m) +
                                 " breaks the staircase (degree " + std::to_string(c.size() - 1) + ")");
          put(m, idx, c[j]);
        }
      }
  };
  place(fb, p, [&](std::size_t m, std::size_t idx, const W& v) { bm(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(idx)) = v; });
  place(fa, q, [&](std::size_t m, std::size_t idx, const W& v) { am(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(m)) = v; });
  return {bm, am};
}

/// Gauss-Borel factorization M = B^{-1} A^{-1} of the n x n moment matrix,
/// B lower and A upper triangular, by LU without pivoting in W. The split
/// of the pivots between the factors is fixed by the leading coefficients
/// of the type II recursion (diag B), so B and A come out as the
/// coefficient matrices of the recursion families; that is cross-checked.
/// Throws NumericalError for a singular leading minor or a residual above tol.
template <class W, class Real>
GaussBorel<Real> gauss_borel_as(const BandedMatrix<Real>& t, const DenseMatrix<Real>& nu, const DenseMatrix<Real>& xi,
                                std::size_t n, Real tol = Real(1e-7)) {
  using std::abs;
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  const auto in = static_cast<Eigen::Index>(n);
  const auto psi = moment_sequence_as<W>(t, detail::moments_needed(n, p, q), nu, xi);
  const DenseMatrix<W> m = detail::interleave(psi, n, p, q);

  DenseMatrix<W> lu = m;
  W min_pivot = n == 0 ? W(0) : W(std::numeric_limits<W>::max());
  for (Eigen::Index k = 0; k < in; ++k) {
    const W block = m.topLeftCorner(k + 1, k + 1).cwiseAbs().maxCoeff();
    const W pivot = abs(lu(k, k));
    if (!(pivot > block * std::numeric_limits<W>::epsilon() * W(1000)))
      throw NumericalError("gauss_borel: leading principal minor of order " + std::to_string(k + 1) + " is singular");
    min_pivot = std::min<W>(min_pivot, pivot / block);
    for (Eigen::Index i = k + 1; i < in; ++i) {
      lu(i, k) /= lu(k, k);
      for (Eigen::Index j = k + 1; j < in; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
    }
  }
  // The leading minors are products of extreme-band entries, so a singular
  // one surfaces here before the recursion below would divide by zero.
  const auto [brec, arec] = recursion_coefficients<W>(t, n, nu, xi);
  const DenseMatrix<W> id = DenseMatrix<W>::Identity(in, in);
  const DenseMatrix<W> l_inv = lu.template triangularView<Eigen::UnitLower>().solve(id);
  const DenseMatrix<W> u_inv = lu.template triangularView<Eigen::Upper>().solve(id);
  const DenseMatrix<W> d = brec.diagonal().asDiagonal();
  const DenseMatrix<W> d_inv = brec.diagonal().cwiseInverse().asDiagonal();
  const DenseMatrix<W> b = d * l_inv;
  const DenseMatrix<W> a = u_inv * d_inv;

  W mismatch(0);
  for (Eigen::Index i = 0; i < in; ++i) {
    const W rs = std::max<W>(brec.row(i).cwiseAbs().maxCoeff(), std::numeric_limits<W>::min());
    mismatch = std::max<W>(mismatch, (b.row(i) - brec.row(i)).cwiseAbs().maxCoeff() / rs);
    const W cs = std::max<W>(arec.col(i).cwiseAbs().maxCoeff(), std::numeric_limits<W>::min());
    mismatch = std::max<W>(mismatch, (a.col(i) - arec.col(i)).cwiseAbs().maxCoeff() / cs);
  }

  GaussBorel<Real> out;
  out.n = n;
  out.bmat = b.template cast<Real>();
  out.amat = a.template cast<Real>();
  out.residual = static_cast<Real>(max_abs(DenseMatrix<W>(b * m * a - id)));
  out.recursion_residual = static_cast<Real>(max_abs(DenseMatrix<W>(brec * m * arec - id)));
  out.recursion_mismatch = static_cast<Real>(mismatch);
  out.min_pivot = static_cast<Real>(min_pivot);
  if (!(out.residual <= tol))
    throw NumericalError("gauss_borel: ||B M A - I|| = " + detail::sci(out.residual) + " above tolerance");
  return out;
}

/// In the extended work type: the block-Hankel moment matrix is so badly
/// conditioned that double loses everything by n ~ 15.
template <class Real>
GaussBorel<Real> gauss_borel(const BandedMatrix<Real>& t, const InitialConditions<Real>& ic, std::size_t n,
                             Real tol = Real(1e-7)) {
  detail::require_mixed(t.upper_bandwidth(), t.lower_bandwidth(), "gauss_borel");
  return gauss_borel_as<work_t<Real>>(t, ic.nu(), ic.xi(), n, tol);
}

/// Spectrum of T^{[N]} together with its Christoffel numbers, the input to
/// the measure-side analytics below.
template <class Real = double>
struct TruncationMeasure {
  TruncationSpectrum<Real> spectrum;
  ChristoffelNumbers<Real> christoffel;
  DenseMatrix<Real> nu;
  DenseMatrix<Real> xi;
};

template <class Real>
TruncationMeasure<Real> truncation_measure(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& nu,
                                           const DenseMatrix<Real>& xi) {
  TruncationMeasure<Real> out{banded_spectrum(t, n, nu, xi), {}, nu, xi};
  out.christoffel = christoffel_numbers(out.spectrum, nu, xi);
  return out;
}

template <class Real>
TruncationMeasure<Real> truncation_measure(const BandedMatrix<Real>& t, std::size_t n, const InitialConditions<Real>& ic = {}) {
  TruncationMeasure<Real> out{truncation_spectrum(t, n, ic), {}, ic.nu(), ic.xi()};
  out.christoffel = christoffel_numbers(out.spectrum, ic);
  return out;
}

namespace detail {

/// xi^{-1} E_p adj(z I - T^{[N]}) E_q^T nu^{-T}, row-major p x q. Entries of
/// E_p adj E_q^T outside the (N+1) x (N+1) adjugate are zero.
template <class C, class Real>
std::vector<C> second_kind_values(const TruncationMeasure<Real>& m, const C& z) {
  using W = typename C::value_type;
  const auto& t = m.spectrum.truncation;
  const std::size_t p = m.spectrum.upper;
  const std::size_t q = m.spectrum.lower;
  const std::size_t dim = static_cast<std::size_t>(t.rows());
  std::vector<C> adj(p * q, C(0));
  for (std::size_t i = 0; i < std::min(p, dim); ++i)
    for (std::size_t j = 0; j < std::min(q, dim); ++j) {
      const C minor = dim == 1 ? C(1) : ComplexLu<C>(shifted_truncation(t, z, j, i), dim - 1).determinant();
      adj[i * q + j] = (i + j) % 2 == 0 ? minor : C(-minor);
    }
  return sandwich(inverse_as<W>(m.xi), adj, DenseMatrix<W>(inverse_as<W>(m.nu).transpose()), p, q);
}

/// sum_k rho_k mu_k^T prod_{l != k} (z - lambda_l), or with `resolvent`
/// sum_k rho_k mu_k^T / (z - lambda_k).
template <class C, class Real>
std::vector<C> spectral_sum(const TruncationMeasure<Real>& m, const C& z, bool resolvent) {
  using W = typename C::value_type;
  const std::size_t p = m.spectrum.upper;
  const std::size_t q = m.spectrum.lower;
  const auto& lam = m.spectrum.ext.lambdas;
  std::vector<C> out(p * q, C(0));
  for (std::size_t k = 0; k < lam.size(); ++k) {
    C f(1);
    if (resolvent) {
      f = C(1) / (z - C(W(lam[k])));
    } else {
      for (std::size_t l = 0; l < lam.size(); ++l)
        if (l != k) f *= z - C(W(lam[l]));
    }
    const auto ik = static_cast<Eigen::Index>(k);
    for (std::size_t b = 0; b < p; ++b)
      for (std::size_t a = 0; a < q; ++a)
        out[b * q + a] += C(W(m.christoffel.rho_ext(ik, static_cast<Eigen::Index>(b)) *
                              m.christoffel.mu_ext(ik, static_cast<Eigen::Index>(a)))) *
                          f;
  }
  return out;
}

/// xi^{-1} E_p (z I - T)^{-1} E_q^T nu^{-T} for a dense truncation.
template <class C, class Real>
std::vector<C> resolvent_block(const DenseMatrix<Real>& t, const DenseMatrix<Real>& nu, const DenseMatrix<Real>& xi,
                               const C& z) {
  using W = typename C::value_type;
  const std::size_t p = static_cast<std::size_t>(xi.rows());
  const std::size_t q = static_cast<std::size_t>(nu.rows());
  const std::size_t dim = static_cast<std::size_t>(t.rows());
  const ComplexLu<C> lu(shifted_truncation(t, z), dim);
  std::vector<C> block(p * q, C(0));
  for (std::size_t j = 0; j < std::min(q, dim); ++j) {
    std::vector<C> e(dim, C(0));
    e[j] = C(1);
    const auto x = lu.solve(e);
    for (std::size_t i = 0; i < std::min(p, dim); ++i) block[i * q + j] = x[i];
  }
  return sandwich(inverse_as<W>(xi), block, DenseMatrix<W>(inverse_as<W>(nu).transpose()), p, q);
}

template <class Real>
WideComplex widen(std::complex<Real> z) {
  return WideComplex(Wide(z.real()), Wide(z.imag()));
}

}  // namespace detail

template <class Real = double>
struct SecondKindMatrix {
  std::complex<Real> z;
  std::size_t n = 0;
  DenseMatrix<std::complex<Real>> value;         ///< from the adjugate
  DenseMatrix<std::complex<Real>> interpolated;  ///< sum_k rho_k mu_k^T prod_{l != k} (z - lambda_l)
  Real residual = Real(0);                       ///< relative max-norm difference
};

/// P^{(1)}_{N+1}(z), matrix of second-kind polynomials of degree <= N.
/// Throws NumericalError when the two formulas differ by more than tol.
template <class Real>
SecondKindMatrix<Real> second_kind_matrix(const TruncationMeasure<Real>& m, std::complex<Real> z, Real tol = Real(1e-7)) {
  const std::size_t p = m.spectrum.upper;
  const std::size_t q = m.spectrum.lower;
  const WideComplex zw = detail::widen(z);
  const auto adj = detail::second_kind_values(m, zw);
  const auto interp = detail::spectral_sum(m, zw, false);
  SecondKindMatrix<Real> out;
  out.z = z;
  out.n = m.spectrum.n;
  out.value = detail::to_std<Real>(adj, p, q);
  out.interpolated = detail::to_std<Real>(interp, p, q);
  out.residual = static_cast<Real>(detail::relative_gap(adj, interp));
  if (!(out.residual <= tol))
    throw NumericalError("second_kind_matrix: adjugate and interpolation forms differ (relative " + detail::sci(out.residual) + ")");
  return out;
}

template <class Real>
SecondKindMatrix<Real> second_kind_matrix(const BandedMatrix<Real>& t, std::size_t n, const InitialConditions<Real>& ic,
                                          std::complex<Real> z, Real tol = Real(1e-7)) {
  return second_kind_matrix(truncation_measure(t, n, ic), z, tol);
}

template <class Real = double>
struct WeylMatrix {
  std::complex<Real> z;
  std::size_t n = 0;
  DenseMatrix<std::complex<Real>> s;                  ///< P^{(1)}_{N+1}(z) / P_{N+1}(z)
  DenseMatrix<std::complex<Real>> partial_fractions;  ///< sum_k rho_k mu_k^T / (z - lambda_k)
  DenseMatrix<std::complex<Real>> resolvent;          ///< xi^{-1} E (z I - T)^{-1} E^T nu^{-T}
  Real residual = Real(0);       ///< largest relative disagreement of the three
  Real pole_distance = Real(0);  ///< min_k |z - lambda_k|
};

/// Matrix of Weyl functions of the truncation, by three routes. Throws
/// PoleProximity when z is (numerically) an eigenvalue, and NumericalError
/// when the routes disagree by more than tol while z is at least a tenth of
/// the smallest eigenvalue gap away from every pole.
template <class Real>
WeylMatrix<Real> weyl_matrix(const TruncationMeasure<Real>& m, std::complex<Real> z, Real tol = Real(1e-7)) {
  using std::abs;
  const std::size_t p = m.spectrum.upper;
  const std::size_t q = m.spectrum.lower;
  const auto& lam = m.spectrum.lambdas;
  Real scale(1), dist = std::numeric_limits<Real>::infinity(), gap = std::numeric_limits<Real>::infinity();
  for (std::size_t k = 0; k < lam.size(); ++k) {
    scale = std::max<Real>(scale, abs(lam[k]));
    dist = std::min<Real>(dist, std::abs(z - std::complex<Real>(lam[k])));
    if (k > 0) gap = std::min<Real>(gap, lam[k - 1] - lam[k]);
  }
  if (dist <= Real(1e-12) * scale) throw PoleProximity("weyl_matrix: z lies on an eigenvalue of T^[N]");

  const WideComplex zw = detail::widen(z);
  const auto& t = m.spectrum.truncation;
  const WideComplex det = detail::ComplexLu<WideComplex>(detail::shifted_truncation(t, zw), static_cast<std::size_t>(t.rows())).determinant();
  auto s = detail::second_kind_values(m, zw);
  for (auto& v : s) v /= det;
  const auto pf = detail::spectral_sum(m, zw, true);
  const auto res = detail::resolvent_block(t, m.nu, m.xi, zw);

  WeylMatrix<Real> out;
  out.z = z;
  out.n = m.spectrum.n;
  out.s = detail::to_std<Real>(s, p, q);
  out.partial_fractions = detail::to_std<Real>(pf, p, q);
  out.resolvent = detail::to_std<Real>(res, p, q);
  out.residual = static_cast<Real>(std::max({detail::relative_gap(s, pf), detail::relative_gap(s, res), detail::relative_gap(pf, res)}));
  out.pole_distance = dist;
  if (dist > Real(0.1) * gap && !(out.residual <= tol))
    throw NumericalError("weyl_matrix: the three routes disagree (relative " + detail::sci(out.residual) + ")");
  return out;
}

template <class Real>
WeylMatrix<Real> weyl_matrix(const BandedMatrix<Real>& t, std::size_t n, const InitialConditions<Real>& ic,
                             std::complex<Real> z, Real tol = Real(1e-7)) {
  return weyl_matrix(truncation_measure(t, n, ic), z, tol);
}

template <class Real = double>
struct WeylProbe {
  std::complex<Real> z;
  std::vector<std::size_t> orders;
  std::vector<DenseMatrix<std::complex<Real>>> values;  ///< S^{[N]}(z) per order
  std::vector<Real> differences;  ///< ||S^{[N_{i+1}]} - S^{[N_i]}||_max
  bool monotone = true;           ///< differences strictly decreasing
  Real radius = Real(0);          ///< spectral radius of the largest truncation
};

/// S^{[N]}(z) from the resolvent of each truncation. z must lie outside
/// the disk holding the spectrum of the largest truncation, enlarged by
/// the relative `margin`; otherwise PoleProximity. The spectra of PBF
/// truncations increase towards the limit set, so the largest one bounds
/// the rest.
template <class Real>
WeylProbe<Real> weyl_convergence_probe(const BandedMatrix<Real>& t, const DenseMatrix<Real>& nu, const DenseMatrix<Real>& xi,
                                       std::complex<Real> z, std::vector<std::size_t> orders, Real margin = Real(0.01)) {
  using std::abs;
  if (orders.empty()) throw std::invalid_argument("weyl_convergence_probe: no truncation orders");
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  detail::check_start_matrix(nu, t.lower_bandwidth(), "nu");
  detail::check_start_matrix(xi, t.upper_bandwidth(), "xi");
  WeylProbe<Real> out;
  out.z = z;
  out.orders = orders;
  const DenseMatrix<Real> largest = t.truncate(orders.back());
  const Eigen::EigenSolver<DenseMatrix<Real>> es(largest, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.radius = std::max<Real>(out.radius, std::abs(es.eigenvalues()(i)));
  if (!(std::abs(z) > out.radius * (Real(1) + margin)))
    throw PoleProximity("weyl_convergence_probe: |z| = " + detail::sci(std::abs(z)) +
                        " is inside the spectral disk of radius " + detail::sci(out.radius));
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  const WideComplex zw = detail::widen(z);
  std::vector<WideComplex> prev;
  for (std::size_t n : orders) {
    auto cur = detail::resolvent_block(t.truncate(n), nu, xi, zw);
    out.values.push_back(detail::to_std<Real>(cur, p, q));
    if (!prev.empty()) {
      std::vector<WideComplex> d(cur.size());
      for (std::size_t i = 0; i < cur.size(); ++i) d[i] = cur[i] - prev[i];
      out.differences.push_back(static_cast<Real>(detail::max_abs_of(d)));
    }
    prev = std::move(cur);
  }
  for (std::size_t i = 1; i < out.differences.size(); ++i)
    if (!(out.differences[i] < out.differences[i - 1])) out.monotone = false;
  return out;
}

template <class Real>
WeylProbe<Real> weyl_convergence_probe(const BandedMatrix<Real>& t, const InitialConditions<Real>& ic, std::complex<Real> z,
                                       std::vector<std::size_t> orders, Real margin = Real(0.01)) {
  detail::require_mixed(t.upper_bandwidth(), t.lower_bandwidth(), "weyl_convergence_probe");
  return weyl_convergence_probe(t, ic.nu(), ic.xi(), z, std::move(orders), margin);
}

template <class Real = double>
struct ContourCheck {
  std::complex<Real> value;  ///< (1 / 2 pi i) of the contour integral
  Real expected = Real(0);   ///< delta_{n,m}
  Real error = Real(0);      ///< |value - expected|
  std::size_t enclosed = 0;  ///< poles inside the circle
  bool encloses_all = false;
};

/// (1 / 2 pi i) of the integral of B_n(z) S(z) A_m(z)^T over the circle
/// |z| = radius, with S = S^{[M]} from `big`, evaluated by residues. S has
/// simple poles at the eigenvalues with residues rho_k mu_k^T, so a
/// counterclockwise circle gives the sum over enclosed poles; this is the
/// same value as the clockwise integral of B_n Shat A_m^T with
/// Shat(z) = -S(z). Throws invalid_argument for a non-positive radius or
/// n, m > M, and PoleProximity when a pole lies on the circle.
template <class Real>
ContourCheck<Real> contour_biorthogonality_check(const BandedMatrix<Real>& t, const TruncationMeasure<Real>& big, std::size_t n,
                                                 std::size_t m, Real radius) {
  using W = work_t<Real>;
  using std::abs;
  if (!(radius > Real(0))) throw std::invalid_argument("contour_biorthogonality_check: radius must be positive");
  if (n > big.spectrum.n || m > big.spectrum.n)
    throw std::invalid_argument("contour_biorthogonality_check: n and m must not exceed the truncation order");
  const auto& lam = big.spectrum.ext.lambdas;
  Real scale(1);
  for (const auto& l : lam) scale = std::max<Real>(scale, static_cast<Real>(abs(l)));
  W acc(0);
  ContourCheck<Real> out;
  for (std::size_t k = 0; k < lam.size(); ++k) {
    const Real ak = static_cast<Real>(abs(lam[k]));
    if (abs(ak - radius) <= Real(1e-12) * scale) throw PoleProximity("contour_biorthogonality_check: a pole lies on the contour");
    if (ak > radius) continue;
    ++out.enclosed;
    const auto b = type_two_family<W>(t, big.xi, n, lam[k]);
    const auto a = type_one_family<W>(t, big.nu, m, lam[k]);
    const auto ik = static_cast<Eigen::Index>(k);
    W rb(0), la(0);
    for (std::size_t f = 0; f < b.size(); ++f) rb += b[f][n] * big.christoffel.rho_ext(ik, static_cast<Eigen::Index>(f));
    for (std::size_t f = 0; f < a.size(); ++f) la += a[f][m] * big.christoffel.mu_ext(ik, static_cast<Eigen::Index>(f));
    acc += rb * la;
  }
  out.encloses_all = out.enclosed == lam.size();
  out.value = std::complex<Real>(static_cast<Real>(acc), Real(0));
  out.expected = n == m ? Real(1) : Real(0);
  out.error = static_cast<Real>(abs(acc - W(out.expected)));
  return out;
}

template <class Real>
ContourCheck<Real> contour_biorthogonality_check(const BandedMatrix<Real>& t, const InitialConditions<Real>& ic, std::size_t n,
                                                 std::size_t m, std::size_t m_big, Real radius) {
  return contour_biorthogonality_check(t, truncation_measure(t, m_big, ic), n, m, radius);
}

template <class Real = double>
struct QuadratureCheck {
  std::size_t a = 1;
  std::size_t b = 1;
  std::size_t n = 0;
  int degree = 0;        ///< d_{b,a}(N)
  int exact_degree = 0;  ///< largest k with residuals 0..k below tol (-1 if k = 0 fails)
  std::vector<Real> residuals;  ///< relative residual for x^0, x^1, ...
  bool exact = false;    ///< exact_degree >= degree
  bool optimal = false;  ///< residual at degree + 1 above 1e-4
};

/// Residuals of sum_k rho_{k,b} mu_{k,a} lambda_k^j against (Psi_j)_{b,a},
/// relative to sum_k |rho_{k,b} mu_{k,a}| |lambda_k|^j, for j = 0 .. degree + 1
/// and beyond while the rule stays exact, up to `max_power`.
template <class Real>
QuadratureCheck<Real> gauss_quadrature_check(const TruncationMeasure<Real>& m, const std::vector<DenseMatrix<work_t<Real>>>& psi,
                                             std::size_t a, std::size_t b, Real tol = Real(1e-8)) {
  using W = work_t<Real>;
  using std::abs;
  const std::size_t p = m.spectrum.upper;
  const std::size_t q = m.spectrum.lower;
  if (a < 1 || a > q || b < 1 || b > p) throw std::invalid_argument("gauss_quadrature_check: entry index out of range");
  QuadratureCheck<Real> out;
  out.a = a;
  out.b = b;
  out.n = m.spectrum.n;
  out.degree = degree_of_precision(out.n, a, b, p, q);
  const auto& lam = m.spectrum.ext.lambdas;
  std::vector<W> weight(lam.size()), power(lam.size(), W(1));
  for (std::size_t k = 0; k < lam.size(); ++k)
    weight[k] = m.christoffel.rho_ext(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b - 1)) *
                m.christoffel.mu_ext(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a - 1));
  out.exact_degree = -1;
  bool contiguous = true;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    if (static_cast<int>(j) > out.degree + 1 && !contiguous) break;
    W sum(0), mag(0);
    for (std::size_t k = 0; k < lam.size(); ++k) {
      sum += weight[k] * power[k];
      mag += abs(weight[k] * power[k]);
      power[k] *= lam[k];
    }
    const W target = psi[j](static_cast<Eigen::Index>(b - 1), static_cast<Eigen::Index>(a - 1));
    const W r = abs(sum - target) / std::max<W>(mag, std::numeric_limits<W>::min());
    out.residuals.push_back(static_cast<Real>(r));
    if (contiguous && r < W(tol)) out.exact_degree = static_cast<int>(j);
    else contiguous = false;
  }
  out.exact = out.exact_degree >= out.degree;
  const auto next = static_cast<std::size_t>(out.degree + 1);
  out.optimal = next < out.residuals.size() && out.residuals[next] > Real(1e-4);
  return out;
}

/// Moments needed to probe every entry of T^{[N]}'s rule one degree past
/// its precision, and a little further while it stays exact.
inline std::size_t quadrature_moment_count(std::size_t n, std::size_t upper = 2, std::size_t lower = 3) {
  return static_cast<std::size_t>(degree_of_precision(n, 1, 1, upper, lower)) + 4;
}

/// The full d_{b,a}(N) table for one truncation, entries ordered (b, a).
template <class Real>
std::vector<QuadratureCheck<Real>> quadrature_table(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& nu,
                                                    const DenseMatrix<Real>& xi, Real tol = Real(1e-8)) {
  const auto m = truncation_measure(t, n, nu, xi);
  const auto psi = moment_sequence_as<work_t<Real>>(t, quadrature_moment_count(n, m.spectrum.upper, m.spectrum.lower), nu, xi);
  std::vector<QuadratureCheck<Real>> out;
  for (std::size_t b = 1; b <= m.spectrum.upper; ++b)
    for (std::size_t a = 1; a <= m.spectrum.lower; ++a) out.push_back(gauss_quadrature_check(m, psi, a, b, tol));
  return out;
}

template <class Real>
std::vector<QuadratureCheck<Real>> quadrature_table(const BandedMatrix<Real>& t, std::size_t n, const InitialConditions<Real>& ic = {},
                                                    Real tol = Real(1e-8)) {
  detail::require_mixed(t.upper_bandwidth(), t.lower_bandwidth(), "quadrature_table");
  const auto m = truncation_measure(t, n, ic);
  const auto psi = moment_sequence_as<work_t<Real>>(t, quadrature_moment_count(n), ic.nu(), ic.xi());
  std::vector<QuadratureCheck<Real>> out;
  for (std::size_t b = 1; b <= 2; ++b)
    for (std::size_t a = 1; a <= 3; ++a) out.push_back(gauss_quadrature_check(m, psi, a, b, tol));
  return out;
}

template <class Real>
QuadratureCheck<Real> gauss_quadrature_check(const BandedMatrix<Real>& t, const InitialConditions<Real>& ic, std::size_t n,
                                             std::size_t a, std::size_t b, Real tol = Real(1e-8)) {
  detail::require_mixed(t.upper_bandwidth(), t.lower_bandwidth(), "gauss_quadrature_check");
  const auto m = truncation_measure(t, n, ic);
  const auto psi = moment_sequence_as<work_t<Real>>(t, quadrature_moment_count(n), ic.nu(), ic.xi());
  return gauss_quadrature_check(m, psi, a, b, tol);
}

}  // namespace favard
