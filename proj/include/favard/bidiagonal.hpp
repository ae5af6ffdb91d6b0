#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "favard/banded.hpp"
#include "favard/dense.hpp"

namespace favard {

/// T = L_1 ... L_q  Delta  U_p ... U_1 with unit bidiagonal factors.
///
/// lowers[k][i] is the subdiagonal entry (i+1, i) of L_{k+1}; lowers[0] is
/// the leftmost factor. uppers[j][i] is the superdiagonal entry (i, i+1) of
/// U_{j+1}; uppers[0] is the rightmost factor. Factors produced by Neville
/// elimination carry leading structural zeros, counted in lower_structural
/// and upper_structural; these do not take part in the positivity test.
template <class Real = double>
struct BidiagonalFactorization {
  std::vector<std::vector<Real>> lowers;
  std::vector<Real> delta;
  std::vector<std::vector<Real>> uppers;
  std::vector<std::size_t> lower_structural;
  std::vector<std::size_t> upper_structural;
  bool positive = false;

  std::size_t dimension() const { return delta.size(); }
  std::size_t lower_count() const { return lowers.size(); }
  std::size_t upper_count() const { return uppers.size(); }
};

namespace detail {

template <class Real>
void check_factor_shapes(const BidiagonalFactorization<Real>& f) {
  const std::size_t n = f.delta.size();
  if (n == 0) throw std::invalid_argument("bidiagonal factorization: empty diagonal");
  for (const auto& l : f.lowers)
    if (l.size() != n - 1) throw std::invalid_argument("bidiagonal factorization: lower factor has wrong length");
  for (const auto& u : f.uppers)
    if (u.size() != n - 1) throw std::invalid_argument("bidiagonal factorization: upper factor has wrong length");
}

template <class Real>
std::size_t structural(const std::vector<std::size_t>& counts, std::size_t k) {
  return k < counts.size() ? counts[k] : 0;
}

}  // namespace detail

template <class Real>
bool all_parameters_positive(const BidiagonalFactorization<Real>& f) {
  for (const Real& d : f.delta)
    if (!(d > Real(0))) return false;
  for (std::size_t k = 0; k < f.lowers.size(); ++k)
    for (std::size_t i = detail::structural<Real>(f.lower_structural, k); i < f.lowers[k].size(); ++i)
      if (!(f.lowers[k][i] > Real(0))) return false;
  for (std::size_t j = 0; j < f.uppers.size(); ++j)
    for (std::size_t i = detail::structural<Real>(f.upper_structural, j); i < f.uppers[j].size(); ++i)
      if (!(f.uppers[j][i] > Real(0))) return false;
  return true;
}

template <class Real>
DenseMatrix<Real> lower_factor(const std::vector<Real>& sub, std::size_t n) {
  DenseMatrix<Real> m = DenseMatrix<Real>::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i + 1 < n; ++i) m(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = sub[i];
  return m;
}

template <class Real>
DenseMatrix<Real> upper_factor(const std::vector<Real>& super, std::size_t n) {
  DenseMatrix<Real> m = DenseMatrix<Real>::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i + 1 < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = super[i];
  return m;
}

/// Factors in product order: L_1, ..., L_q, Delta, U_p, ..., U_1.
template <class Real>
std::vector<DenseMatrix<Real>> factor_sequence(const BidiagonalFactorization<Real>& f) {
  detail::check_factor_shapes(f);
  const std::size_t n = f.dimension();
  std::vector<DenseMatrix<Real>> seq;
  for (const auto& l : f.lowers) seq.push_back(lower_factor(l, n));
  DenseVector<Real> d(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) d(static_cast<Eigen::Index>(i)) = f.delta[i];
  seq.push_back(d.asDiagonal());
  for (std::size_t j = f.uppers.size(); j-- > 0;) seq.push_back(upper_factor(f.uppers[j], n));
  return seq;
}

template <class Real>
DenseMatrix<Real> reassemble(const BidiagonalFactorization<Real>& f) {
  const auto seq = factor_sequence(f);
  DenseMatrix<Real> acc = seq.front();
  for (std::size_t i = 1; i < seq.size(); ++i) acc = acc * seq[i];
  return acc;
}

/// Banded matrix represented by the product of the given (finite) factors.
/// The leading principal submatrices of a product of lower, diagonal and
/// upper triangular factors are the products of the factor truncations, so
/// every truncation of the result is exact.
template <class Real>
BandedMatrix<Real> banded_from_factors(const BidiagonalFactorization<Real>& f) {
  const DenseMatrix<Real> m = reassemble(f);
  return BandedMatrix<Real>::from_generator(f.upper_count(), f.lower_count(), f.dimension(),
                                            [&](std::size_t r, std::size_t c) {
                                              return m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                                            });
}

/// Factors with every parameter equal to `value` (one for the reference
/// matrix T1 with three lower and two upper factors).
template <class Real = double>
BidiagonalFactorization<Real> constant_factors(std::size_t upper, std::size_t lower, std::size_t size,
                                               Real value = Real(1)) {
  BidiagonalFactorization<Real> f;
  f.lowers.assign(lower, std::vector<Real>(size - 1, value));
  f.uppers.assign(upper, std::vector<Real>(size - 1, value));
  f.delta.assign(size, value);
  f.lower_structural.assign(lower, 0);
  f.upper_structural.assign(upper, 0);
  f.positive = value > Real(0);
  return f;
}

/// The reference (2,3) matrix T1 = L_1 L_2 L_3 U_2 U_1 with unit parameters.
template <class Real = double>
BandedMatrix<Real> reference_t1(std::size_t size) {
  return banded_from_factors(constant_factors<Real>(2, 3, size, Real(1)));
}

enum class FactorizationStatus { ok, not_pbf, degenerate };

template <class Real = double>
struct FactorizationFailure {
  FactorizationStatus kind;
  /// "pivot", "L<k>" or "U<j>" indexed as in the product L1 L2 L3 Delta U2 U1.
  std::string factor;
  std::size_t index;
  Real value;

  std::string message() const {
    const char* what = kind == FactorizationStatus::degenerate ? "degenerate" : "not PBF";
    return std::string(what) + ": " + factor + "[" + std::to_string(index) + "] = " + std::to_string(double(value));
  }
};

template <class Real = double>
struct FactorizationResult {
  FactorizationStatus status = FactorizationStatus::degenerate;
  BidiagonalFactorization<Real> factors;
  std::optional<FactorizationFailure<Real>> failure;

  bool positive() const { return status == FactorizationStatus::ok; }
};

namespace detail {

template <class Real>
struct NevilleSweep {
  // multiplier(i, j) used to eliminate entry (i, j) with row i-1.
  DenseMatrix<Real> multipliers;
  DenseMatrix<Real> reduced;
  bool complete = true;
  std::size_t fail_row = 0;
  std::size_t fail_col = 0;
};

/// Neville elimination of the lower part (at most `lower` subdiagonals):
/// each column is cleared bottom-up using the adjacent row above.
template <class Real>
NevilleSweep<Real> neville_sweep(const DenseMatrix<Real>& m, std::size_t lower, Real zero_tol) {
  NevilleSweep<Real> s;
  const Eigen::Index n = m.rows();
  s.reduced = m;
  s.multipliers = DenseMatrix<Real>::Zero(n, n);
  const Eigen::Index q = static_cast<Eigen::Index>(lower);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    for (Eigen::Index i = std::min<Eigen::Index>(n - 1, j + q); i > j; --i) {
      const Real cur = s.reduced(i, j);
      if (cur == Real(0)) continue;
      const Real above = s.reduced(i - 1, j);
      if (std::abs(above) <= zero_tol) {
        s.complete = false;
        s.fail_row = static_cast<std::size_t>(i - 1);
        s.fail_col = static_cast<std::size_t>(j);
        return s;
      }
      const Real mult = cur / above;
      s.reduced.row(i) -= mult * s.reduced.row(i - 1);
      s.reduced(i, j) = Real(0);
      s.multipliers(i, j) = mult;
    }
  }
  return s;
}

template <class Real>
Real zero_tolerance(const DenseMatrix<Real>& m) {
  return Real(64) * std::numeric_limits<Real>::epsilon() * std::max<Real>(max_abs(m), std::numeric_limits<Real>::min());
}

/// Groups Neville multipliers into bidiagonal factors, outermost first:
/// factor k collects the multipliers at distance width - k.
template <class Real>
void group_factors(const DenseMatrix<Real>& mult, std::size_t width, std::vector<std::vector<Real>>& factors,
                   std::vector<std::size_t>& structural) {
  const std::size_t n = static_cast<std::size_t>(mult.rows());
  factors.assign(width, std::vector<Real>(n - 1, Real(0)));
  structural.assign(width, 0);
  for (std::size_t k = 0; k < width; ++k) {
    const std::size_t dist = width - k;
    structural[k] = std::min(dist - 1, n - 1);
    for (std::size_t r = dist - 1; r + 1 < n; ++r)
      factors[k][r] = mult(static_cast<Eigen::Index>(r + 1), static_cast<Eigen::Index>(r + 1 - dist));
  }
}

}  // namespace detail

/// Bidiagonal factorization of a banded matrix with `upper` superdiagonals
/// and `lower` subdiagonals by Neville elimination, returned in the order
/// L_1 ... L_q Delta U_p ... U_1 (L_q and U_p are the innermost factors).
///
/// A zero pivot is reported as FactorizationStatus::degenerate and the
/// factors are left partially filled. A completed elimination with some
/// nonpositive parameter is FactorizationStatus::not_pbf; the factors are
/// still returned for inspection.
template <class Real>
FactorizationResult<Real> neville_factorize(const DenseMatrix<Real>& m, std::size_t upper, std::size_t lower) {
  if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("neville_factorize: matrix must be square and non-empty");
  require_finite(m, "neville_factorize");
  const std::size_t n = static_cast<std::size_t>(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != Real(0) && (j - i > static_cast<Eigen::Index>(upper) || i - j > static_cast<Eigen::Index>(lower)))
        throw std::invalid_argument("neville_factorize: matrix has entries outside the declared band");

  const Real tol = detail::zero_tolerance(m);
  FactorizationResult<Real> out;
  auto& f = out.factors;
  f.delta.assign(n, Real(0));

  auto degenerate = [&](std::string factor, std::size_t index, Real value) {
    out.status = FactorizationStatus::degenerate;
    out.failure = FactorizationFailure<Real>{FactorizationStatus::degenerate, std::move(factor), index, value};
    f.positive = false;
    return out;
  };

  const auto low = detail::neville_sweep(m, lower, tol);
  detail::group_factors(low.multipliers, lower, f.lowers, f.lower_structural);
  if (!low.complete) return degenerate("pivot", low.fail_row, low.reduced(static_cast<Eigen::Index>(low.fail_row), static_cast<Eigen::Index>(low.fail_col)));

  for (std::size_t i = 0; i < n; ++i) {
    f.delta[i] = low.reduced(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    if (std::abs(f.delta[i]) <= tol) return degenerate("pivot", i, f.delta[i]);
  }

  DenseMatrix<Real> unit_upper = low.reduced;
  for (std::size_t i = 0; i < n; ++i) unit_upper.row(static_cast<Eigen::Index>(i)) /= f.delta[i];
  const DenseMatrix<Real> ut = unit_upper.transpose();
  const auto up = detail::neville_sweep(ut, upper, tol);
  detail::group_factors(up.multipliers, upper, f.uppers, f.upper_structural);
  // group_factors lists outermost first; the rightmost upper factor is U_1.
  if (!up.complete) return degenerate("pivot", up.fail_row, Real(0));

  f.positive = all_parameters_positive(f);
  out.status = f.positive ? FactorizationStatus::ok : FactorizationStatus::not_pbf;
  if (!f.positive) {
    for (std::size_t i = 0; i < n && !out.failure; ++i)
      if (!(f.delta[i] > Real(0))) out.failure = FactorizationFailure<Real>{FactorizationStatus::not_pbf, "Delta", i, f.delta[i]};
    for (std::size_t k = 0; k < f.lowers.size() && !out.failure; ++k)
      for (std::size_t i = f.lower_structural[k]; i < f.lowers[k].size() && !out.failure; ++i)
        if (!(f.lowers[k][i] > Real(0)))
          out.failure = FactorizationFailure<Real>{FactorizationStatus::not_pbf, "L" + std::to_string(k + 1), i, f.lowers[k][i]};
    for (std::size_t j = 0; j < f.uppers.size() && !out.failure; ++j)
      for (std::size_t i = f.upper_structural[j]; i < f.uppers[j].size() && !out.failure; ++i)
        if (!(f.uppers[j][i] > Real(0)))
          out.failure = FactorizationFailure<Real>{FactorizationStatus::not_pbf, "U" + std::to_string(j + 1), i, f.uppers[j][i]};
  }
  return out;
}

template <class Real>
struct OscillationCertificate {
  bool oscillatory = false;
  bool totally_nonnegative = false;
  bool nonsingular = false;
  bool offdiagonals_positive = false;
  std::string reason;
};

/// Gantmacher-Krein test: M is oscillatory iff it is totally nonnegative,
/// nonsingular and its first sub- and superdiagonal are strictly positive.
/// Total nonnegativity of a nonsingular matrix is certified by a complete
/// Neville elimination of M and of its unit upper factor's transpose with
/// nonnegative multipliers and positive pivots.
template <class Real>
OscillationCertificate<Real> is_oscillatory(const DenseMatrix<Real>& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("is_oscillatory: matrix must be square and non-empty");
  OscillationCertificate<Real> cert;
  const Eigen::Index n = m.rows();
  const std::size_t width = static_cast<std::size_t>(n - 1);
  const Real tol = detail::zero_tolerance(m);

  cert.offdiagonals_positive = true;
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (!(m(i + 1, i) > Real(0)) || !(m(i, i + 1) > Real(0))) cert.offdiagonals_positive = false;

  const auto low = detail::neville_sweep(m, width, tol);
  if (!low.complete) {
    cert.reason = "Neville elimination needs a row exchange at row " + std::to_string(low.fail_row) + " (zero pivot)";
    return cert;
  }
  bool nonneg = (low.multipliers.array() >= Real(0)).all();
  cert.nonsingular = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(low.reduced(i, i)) <= tol) cert.nonsingular = false;
    if (!(low.reduced(i, i) > Real(0))) nonneg = false;
  }
  if (!cert.nonsingular) {
    cert.reason = "singular: zero diagonal pivot";
    return cert;
  }
  DenseMatrix<Real> unit_upper = low.reduced;
  for (Eigen::Index i = 0; i < n; ++i) unit_upper.row(i) /= low.reduced(i, i);
  const auto up = detail::neville_sweep(DenseMatrix<Real>(unit_upper.transpose()), width, tol);
  if (!up.complete) {
    cert.reason = "Neville elimination of the upper factor needs a row exchange";
    return cert;
  }
  nonneg = nonneg && (up.multipliers.array() >= Real(0)).all();
  cert.totally_nonnegative = nonneg;
  if (!nonneg) {
    cert.reason = "not totally nonnegative: negative Neville multiplier or nonpositive pivot";
    return cert;
  }
  if (!cert.offdiagonals_positive) {
    cert.reason = "first sub- or superdiagonal has a nonpositive entry";
    return cert;
  }
  cert.oscillatory = true;
  return cert;
}

/// Smallest s >= 0 (to bisection resolution 1e-6 * (1 + ||T^[N]||_1)) for
/// which the truncation of T + sI has a positive bidiagonal factorization.
/// Returns +infinity when no s below 10 * max(1, ||T^[N]||_1) works.
template <class Real>
Real find_oscillatory_shift(const BandedMatrix<Real>& t, std::size_t n) {
  const DenseMatrix<Real> base = t.truncate(n);
  const Real norm = norm_one(base);
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  const DenseMatrix<Real> id = DenseMatrix<Real>::Identity(base.rows(), base.cols());
  auto works = [&](Real s) {
    return neville_factorize(DenseMatrix<Real>(base + s * id), p, q).positive();
  };
  if (works(Real(0))) return Real(0);

  const Real limit = Real(10) * std::max<Real>(Real(1), norm);
  const Real resolution = Real(1e-6) * (Real(1) + norm);
  Real lo(0);
  Real hi = std::max<Real>(resolution, Real(1e-3) * (Real(1) + norm));
  while (!works(hi)) {
    lo = hi;
    hi *= Real(2);
    if (hi > limit) {
      if (works(limit)) {
        hi = limit;
        break;
      }
      return std::numeric_limits<Real>::infinity();
    }
  }
  while (hi - lo > resolution) {
    const Real mid = (lo + hi) / Real(2);
    if (works(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

/// Cyclic reordering of the factor product. variant = +a moves L_1..L_a to
/// the right end (1 <= a <= q); variant = -b moves U_b..U_1 to the left end
/// (1 <= b <= p). For three lower and two upper factors this gives
///   -2: U_2 U_1 L_1 L_2 L_3 Delta      +1: L_2 L_3 Delta U_2 U_1 L_1
///   -1: U_1 L_1 L_2 L_3 Delta U_2      +2: L_3 Delta U_2 U_1 L_1 L_2
///                                      +3: Delta U_2 U_1 L_1 L_2 L_3
template <class Real>
DenseMatrix<Real> darboux_transform(const BidiagonalFactorization<Real>& f, int variant) {
  const int q = static_cast<int>(f.lower_count());
  const int p = static_cast<int>(f.upper_count());
  if (variant == 0 || variant > q || variant < -p)
    throw std::invalid_argument("darboux_transform: variant " + std::to_string(variant) + " not in [-" +
                                std::to_string(p) + ", " + std::to_string(q) + "] \\ {0}");
  const auto seq = factor_sequence(f);
  const std::size_t len = seq.size();
  const std::size_t start = variant > 0 ? static_cast<std::size_t>(variant) : len - static_cast<std::size_t>(-variant);
  DenseMatrix<Real> acc = seq[start % len];
  for (std::size_t s = 1; s < len; ++s) acc = acc * seq[(start + s) % len];
  return acc;
}

}  // namespace favard
