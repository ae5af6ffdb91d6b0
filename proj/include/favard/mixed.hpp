#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "favard/banded.hpp"
#include "favard/bidiagonal.hpp"
#include "favard/dense.hpp"
#include "favard/errors.hpp"
#include "favard/poly.hpp"
#include "favard/precision.hpp"

namespace favard {

/// Free entries of the unit lower triangular initial-condition matrices
///   nu = [[1,0,0],[nu11,1,0],[nu12,nu22,1]],  xi = [[1,0],[xi1,1]].
template <class Real = double>
struct InitialConditions {
  Real nu11 = Real(0);
  Real nu12 = Real(0);
  Real nu22 = Real(0);
  Real xi1 = Real(0);

  DenseMatrix<Real> nu() const {
    DenseMatrix<Real> m = DenseMatrix<Real>::Identity(3, 3);
    m(1, 0) = nu11;
    m(2, 0) = nu12;
    m(2, 1) = nu22;
    return m;
  }

  DenseMatrix<Real> xi() const {
    DenseMatrix<Real> m = DenseMatrix<Real>::Identity(2, 2);
    m(1, 0) = xi1;
    return m;
  }

  bool is_identity() const { return nu11 == Real(0) && nu12 == Real(0) && nu22 == Real(0) && xi1 == Real(0); }

  template <class To>
  InitialConditions<To> cast() const {
    return InitialConditions<To>{To(nu11), To(nu12), To(nu22), To(xi1)};
  }

  friend bool operator==(const InitialConditions&, const InitialConditions&) = default;
};

/// Initial conditions adapted to a positive bidiagonal factorization
/// T = L1 L2 L3 Delta U2 U1 (all parameters positive, no structural zeros).
/// They make mu_k = (w_1, (w L1)_1 / l, (w L1 L2)_1 / l') and
/// rho_k = (u_1, (U1 u)_1 / g), first components of eigenvectors of Darboux
/// transforms of T^{[N]}, which is what makes every rho_{k,b} mu_{k,a} > 0.
/// With identity initial conditions only rho_{k,1} mu_{k,1} keeps its sign.
template <class Real>
InitialConditions<Real> pbf_initial_conditions(const BidiagonalFactorization<Real>& f) {
  if (f.lowers.size() != 3 || f.uppers.size() != 2)
    throw std::invalid_argument("pbf_initial_conditions: expected three lower and two upper factors");
  if (f.lowers[0].size() < 2 || f.lowers[1].empty() || f.uppers[0].empty())
    throw std::invalid_argument("pbf_initial_conditions: factorization is too small");
  const Real l10 = f.lowers[0][0];
  const Real l11 = f.lowers[0][1];
  const Real l20 = f.lowers[1][0];
  const Real g = f.uppers[0][0];
  if (!(l10 > Real(0) && l11 > Real(0) && l20 > Real(0) && g > Real(0)))
    throw std::invalid_argument("pbf_initial_conditions: leading factor parameters must be positive");
  // nu^{-1} = [[1,0,0],[c,1,0],[e,d,1]]
  const Real c = Real(1) / l10;
  const Real d = (l10 + l20) / (l11 * l20);
  const Real e = Real(1) / (l11 * l20);
  return InitialConditions<Real>{-c, c * d - e, -d, -Real(1) / g};
}

/// Identity initial conditions of the requested sizes, for widths other than (2,3).
template <class Real = double>
std::pair<DenseMatrix<Real>, DenseMatrix<Real>> identity_start(std::size_t upper, std::size_t lower) {
  return {DenseMatrix<Real>::Identity(static_cast<Eigen::Index>(lower), static_cast<Eigen::Index>(lower)),
          DenseMatrix<Real>::Identity(static_cast<Eigen::Index>(upper), static_cast<Eigen::Index>(upper))};
}

/// Storage type for extended-precision results: at least 100 digits.
template <class Real>
using work_t = std::conditional_t<(std::numeric_limits<Real>::digits > std::numeric_limits<Wider>::digits), Real, Wider>;

/// Value and first derivative, propagated through the recurrences.
template <class X>
struct Dual {
  X v{};
  X d{};

  Dual() = default;
  Dual(X value, X deriv) : v(std::move(value)), d(std::move(deriv)) {}
  template <class S>
    requires(!std::is_same_v<std::decay_t<S>, Dual>)
  Dual(const S& value) : v(X(value)), d(X(0)) {}

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  template <class S>
  friend Dual operator*(const Dual& a, const S& s) {
    const X f(s);
    return {a.v * f, a.d * f};
  }
  template <class S>
  friend Dual operator/(const Dual& a, const S& s) {
    const X f(s);
    return {a.v / f, a.d / f};
  }
};

namespace detail {

/// Stand-in for the variable x when the families are built as polynomials.
struct Indeterminate {};

template <class V>
struct is_poly : std::false_type {};
template <class R>
struct is_poly<Poly<R>> : std::true_type {};

template <class V, class C>
V lift(const C& c) {
  if constexpr (is_poly<V>::value) return V::constant(typename V::value_type(c));
  else return V(c);
}

template <class R>
Poly<R> times_point(const Indeterminate&, const Poly<R>& p) {
  return p.times_x();
}

template <class S>
S times_point(const S& x, const S& v) {
  return x * v;
}

template <class V>
V laplace_det(const std::vector<std::vector<V>>& m) {
  const std::size_t k = m.size();
  if (k == 0) return lift<V>(1);
  if (k == 1) return m[0][0];
  if (k == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  V acc{};
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::vector<V>> minor;
    for (std::size_t r = 1; r < k; ++r) {
      std::vector<V> row;
      for (std::size_t cc = 0; cc < k; ++cc)
        if (cc != c) row.push_back(m[r][cc]);
      minor.push_back(std::move(row));
    }
    const V term = m[0][c] * laplace_det(minor);
    acc = c % 2 == 0 ? acc + term : acc - term;
  }
  return acc;
}

/// Cofactors of the first row of the k x k matrix whose rows 1..k-1 are
/// `rest`. det = sum_c row0[c] * cofactor[c].
template <class V>
std::vector<V> first_row_cofactors(const std::vector<std::vector<V>>& rest, std::size_t k) {
  std::vector<V> out;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::vector<V>> minor;
    for (const auto& row : rest) {
      std::vector<V> r;
      for (std::size_t cc = 0; cc < k; ++cc)
        if (cc != c) r.push_back(row[cc]);
      minor.push_back(std::move(r));
    }
    const V d = laplace_det(minor);
    out.push_back(c % 2 == 0 ? d : V{} - d);
  }
  return out;
}

template <class V>
std::vector<V> family_row(const std::vector<std::vector<V>>& fam, std::size_t n) {
  std::vector<V> row;
  for (const auto& f : fam) row.push_back(f[n]);
  return row;
}

template <class V>
V block_det(const std::vector<std::vector<V>>& fam, std::size_t first) {
  std::vector<std::vector<V>> m;
  for (std::size_t i = 0; i < fam.size(); ++i) m.push_back(family_row(fam, first + i));
  return laplace_det(m);
}

template <class Real>
void check_start_matrix(const DenseMatrix<Real>& m, std::size_t size, const char* name) {
  if (static_cast<std::size_t>(m.rows()) != size || static_cast<std::size_t>(m.cols()) != size)
    throw std::invalid_argument(std::string("initial conditions: ") + name + " has the wrong size");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (m(i, i) != Real(1)) throw std::invalid_argument(std::string("initial conditions: ") + name + " needs a unit diagonal");
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != Real(0)) throw std::invalid_argument(std::string("initial conditions: ") + name + " must be lower triangular");
  }
}

template <class Real>
std::string sci(const Real& v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", static_cast<double>(v));
  return buf;
}

inline void require_size(std::size_t have, std::size_t need, const char* who) {
  if (have < need)
    throw std::out_of_range(std::string(who) + ": needs " + std::to_string(need) + " represented rows, matrix has " +
                            std::to_string(have));
}

}  // namespace detail

/// Type II families: T B^b = x B^b, B^b_j = xi(j, b) for j < p. Row n gives
///   B_{n+p} = (x B_n - sum_{j=n-q}^{n+p-1} T_{n,j} B_j) / T_{n,n+p}.
/// Returns out[b][n] for n = 0..last. V is Poly<Real> (pass
/// detail::Indeterminate for x) or any scalar type.
template <class V, class Real, class X>
std::vector<std::vector<V>> type_two_family(const BandedMatrix<Real>& t, const DenseMatrix<Real>& xi, std::size_t last,
                                            const X& x) {
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  detail::check_start_matrix(xi, p, "xi");
  if (last >= p) detail::require_size(t.size(), last + 1, "type II recursion");
  std::vector<std::vector<V>> b(p, std::vector<V>(last + 1));
  for (std::size_t j = 0; j < std::min(p, last + 1); ++j)
    for (std::size_t f = 0; f < p; ++f) b[f][j] = detail::lift<V>(xi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(f)));
  for (std::size_t n = 0; n + p <= last; ++n) {
    const Real lead = t(n, n + p);
    if (lead == Real(0))
      throw std::domain_error("type II recursion: T(" + std::to_string(n) + "," + std::to_string(n + p) + ") vanishes");
    const std::size_t lo = n >= q ? n - q : 0;
    for (std::size_t f = 0; f < p; ++f) {
      V acc = detail::times_point(x, b[f][n]);
      for (std::size_t j = lo; j < n + p; ++j) acc = acc - b[f][j] * t(n, j);
      b[f][n + p] = acc / lead;
    }
  }
  return b;
}

/// Type I families: A^a T = x A^a, A^a_j = nu(j, a) for j < q. Column n gives
///   A_{n+q} = (x A_n - sum_{i=n-p}^{n+q-1} A_i T_{i,n}) / T_{n+q,n}.
template <class V, class Real, class X>
std::vector<std::vector<V>> type_one_family(const BandedMatrix<Real>& t, const DenseMatrix<Real>& nu, std::size_t last,
                                            const X& x) {
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  detail::check_start_matrix(nu, q, "nu");
  if (last >= q) detail::require_size(t.size(), last + 1, "type I recursion");
  std::vector<std::vector<V>> a(q, std::vector<V>(last + 1));
  for (std::size_t j = 0; j < std::min(q, last + 1); ++j)
    for (std::size_t f = 0; f < q; ++f) a[f][j] = detail::lift<V>(nu(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(f)));
  for (std::size_t n = 0; n + q <= last; ++n) {
    const Real lead = t(n + q, n);
    if (lead == Real(0))
      throw std::domain_error("type I recursion: T(" + std::to_string(n + q) + "," + std::to_string(n) + ") vanishes");
    const std::size_t lo = n >= p ? n - p : 0;
    for (std::size_t f = 0; f < q; ++f) {
      V acc = detail::times_point(x, a[f][n]);
      for (std::size_t i = lo; i < n + q; ++i) acc = acc - a[f][i] * t(i, n);
      a[f][n + q] = acc / lead;
    }
  }
  return a;
}

/// ceil((n + 2 - index) / width) - 1; index is 1-based.
inline int family_degree(std::size_t n, std::size_t index, std::size_t width) {
  const long num = static_cast<long>(n) + 2 - static_cast<long>(index);
  const long w = static_cast<long>(width);
  const long c = num >= 0 ? (num + w - 1) / w : -((-num) / w);
  return static_cast<int>(c) - 1;
}

/// d_{b,a}(N) = ceil((N+2-a)/q) + ceil((N+2-b)/p) - 1.
inline int degree_of_precision(std::size_t n, std::size_t a, std::size_t b, std::size_t upper = 2, std::size_t lower = 3) {
  return family_degree(n, a, lower) + family_degree(n, b, upper) + 1;
}

/// alpha_N = (-1)^{N(q-1)} prod_{i<N} T_{i+q,i}, accumulated in Out.
template <class Out, class Real>
Out alpha_product_as(const BandedMatrix<Real>& t, std::size_t n) {
  const std::size_t q = t.lower_bandwidth();
  Out acc(1);
  for (std::size_t i = 0; i < n; ++i) acc *= Out(t(i + q, i));
  return (n * (q - 1)) % 2 == 0 ? acc : Out(-acc);
}

/// beta_N = (-1)^{N(p-1)} prod_{i<N} T_{i,i+p}, accumulated in Out.
template <class Out, class Real>
Out beta_product_as(const BandedMatrix<Real>& t, std::size_t n) {
  const std::size_t p = t.upper_bandwidth();
  Out acc(1);
  for (std::size_t i = 0; i < n; ++i) acc *= Out(t(i, i + p));
  return (n * (p - 1)) % 2 == 0 ? acc : Out(-acc);
}

template <class Real>
Real alpha_product(const BandedMatrix<Real>& t, std::size_t n) {
  return alpha_product_as<Real>(t, n);
}

template <class Real>
Real beta_product(const BandedMatrix<Real>& t, std::size_t n) {
  return beta_product_as<Real>(t, n);
}

template <class Real = double>
struct RecursionFamilies {
  std::size_t n = 0;
  /// a[a-1][m] = A^a_m for m <= N + q - 1; b[b-1][m] = B^b_m for m <= N + p - 1.
  std::vector<std::vector<Poly<Real>>> a;
  std::vector<std::vector<Poly<Real>>> b;
  /// Every degree at most the degree-law value (deg A^a_m = ceil((m+2-a)/q) - 1).
  bool degrees_bounded = true;
  /// Every degree equal to the degree-law value. Zero initial slots (for
  /// example nu11 = 0) give lower degrees, so this is only generic.
  bool degrees_exact = true;
};

template <class Real>
RecursionFamilies<Real> recursion_families(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& nu,
                                           const DenseMatrix<Real>& xi) {
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  RecursionFamilies<Real> out;
  out.n = n;
  out.a = type_one_family<Poly<Real>>(t, nu, n + q - 1, detail::Indeterminate{});
  out.b = type_two_family<Poly<Real>>(t, xi, n + p - 1, detail::Indeterminate{});
  auto check = [&](const auto& fam, std::size_t width) {
    for (std::size_t f = 0; f < fam.size(); ++f)
      for (std::size_t m = 0; m < fam[f].size(); ++m) {
        const int want = family_degree(m, f + 1, width);
        const int got = fam[f][m].degree();
        if (got > want) out.degrees_bounded = false;
        if (got != want) out.degrees_exact = false;
      }
  };
  check(out.a, q);
  check(out.b, p);
  if (!out.degrees_bounded) throw NumericalError("recursion_families: a polynomial exceeds its degree law");
  return out;
}

/// The (2,3) families A^1..A^3 (m <= N+2) and B^1, B^2 (m <= N+1).
template <class Real>
RecursionFamilies<Real> recursion_vectors(const BandedMatrix<Real>& t, std::size_t n, const InitialConditions<Real>& ic = {}) {
  if (t.upper_bandwidth() != 2 || t.lower_bandwidth() != 3)
    throw std::invalid_argument("recursion_vectors: expected 2 superdiagonals and 3 subdiagonals");
  return recursion_families(t, n, ic.nu(), ic.xi());
}

/// P_0 .. P_{N+1}, P_m = det(x I_m - T^{[m-1]}).
template <class Real>
std::vector<Poly<Real>> char_polys(const BandedMatrix<Real>& t, std::size_t n) {
  detail::require_size(t.size(), n + 1, "char_polys");
  std::vector<Poly<Real>> out{Poly<Real>::constant(Real(1))};
  for (std::size_t m = 0; m <= n; ++m) out.push_back(dense_charpoly(t.truncate(m)));
  return out;
}

template <class Real = double>
struct DeterminantalPolys {
  std::size_t n = 0;
  std::vector<Poly<Real>> q;  ///< Q_{m,N}, m = 0..N+q-1 (the last q-1 vanish)
  std::vector<Poly<Real>> r;  ///< R_{m,N}, m = 0..N+p-1 (the last p-1 vanish)
  Real alpha = Real(1);
  Real beta = Real(1);
  Poly<Real> p_n;      ///< det(x I - T^{[N-1]}) from the dense matrix
  Real alpha_residual = Real(0);  ///< |P_N - alpha_N det A_N| relative, coefficient-wise
  Real beta_residual = Real(0);   ///< |P_N - beta_N det B_N| relative, coefficient-wise
  bool consistent = true;         ///< both residuals <= 1e-8
};

/// Built in the extended work type and rounded: the type I recursion
/// cancels badly enough in double that alpha_N det A_N drifts past 1e-8
/// from N ~ 13 on random PBF matrices.
template <class Real>
DeterminantalPolys<Real> determinantal_polys(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& nu,
                                             const DenseMatrix<Real>& xi) {
  using W = work_t<Real>;
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  const BandedMatrix<W> tw = t.template cast<W>();
  const auto fam = recursion_families(tw, n, DenseMatrix<W>(nu.template cast<W>()), DenseMatrix<W>(xi.template cast<W>()));
  DeterminantalPolys<Real> out;
  out.n = n;
  out.alpha = alpha_product(t, n);
  out.beta = beta_product(t, n);

  std::vector<std::vector<Poly<W>>> rest_a;
  for (std::size_t i = 1; i < q; ++i) rest_a.push_back(detail::family_row(fam.a, n + i));
  const auto ca = detail::first_row_cofactors(rest_a, q);
  for (std::size_t m = 0; m < n + q; ++m) {
    Poly<W> acc;
    for (std::size_t f = 0; f < q; ++f) acc += fam.a[f][m] * ca[f];
    out.q.push_back(poly_cast<Real>(acc));
  }
  std::vector<std::vector<Poly<W>>> rest_b;
  for (std::size_t i = 1; i < p; ++i) rest_b.push_back(detail::family_row(fam.b, n + i));
  const auto cb = detail::first_row_cofactors(rest_b, p);
  for (std::size_t m = 0; m < n + p; ++m) {
    Poly<W> acc;
    for (std::size_t f = 0; f < p; ++f) acc += fam.b[f][m] * cb[f];
    out.r.push_back(poly_cast<Real>(acc));
  }

  out.p_n = n == 0 ? Poly<Real>::constant(Real(1)) : dense_charpoly(t.truncate(n - 1));
  const Poly<W> pw = poly_cast<W>(out.p_n);
  out.alpha_residual = static_cast<Real>(relative_coeff_distance(pw, detail::block_det(fam.a, n) * alpha_product_as<W>(t, n)));
  out.beta_residual = static_cast<Real>(relative_coeff_distance(pw, detail::block_det(fam.b, n) * beta_product_as<W>(t, n)));
  out.consistent = out.alpha_residual <= Real(1e-8) && out.beta_residual <= Real(1e-8);
  return out;
}

template <class Real>
DeterminantalPolys<Real> determinantal_polys(const BandedMatrix<Real>& t, std::size_t n, const InitialConditions<Real>& ic = {}) {
  return determinantal_polys(t, n, ic.nu(), ic.xi());
}

/// Pointwise values of everything the eigenvector formulas need at one
/// point x, in extended precision.
template <class W>
struct PointData {
  W p_n{};        ///< P_N(x) = beta_N det B_N(x)
  W p_next{};     ///< P_{N+1}(x)
  W dp_next{};    ///< P'_{N+1}(x)
  W dp_n{};       ///< P'_N(x)
  std::vector<W> q;       ///< Q_{m,N}(x), m = 0..N
  std::vector<W> r;       ///< R_{m,N}(x), m = 0..N
  std::vector<W> cof_a;   ///< first-row cofactors of the Q determinant
  std::vector<W> cof_b;   ///< first-row cofactors of the R determinant
  std::vector<std::vector<W>> a;  ///< A^a_m(x), m <= N + q - 1
  std::vector<std::vector<W>> b;  ///< B^b_m(x), m <= N + p - 1
};

namespace detail {

template <class W, class Real>
std::pair<W, W> char_value(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& xi, const W& x) {
  // P_{N+1}(x) and its derivative from beta_{N+1} det B_{N+1}.
  const std::size_t p = t.upper_bandwidth();
  const auto b = type_two_family<Dual<W>>(t, xi, n + p, Dual<W>(x, W(1)));
  std::vector<std::vector<Dual<W>>> blk;
  for (std::size_t i = 0; i < p; ++i) blk.push_back(family_row(b, n + 1 + i));
  const Dual<W> d = laplace_det(blk);
  const W beta = beta_product_as<W>(t, n + 1);
  return {d.v * beta, d.d * beta};
}

/// Zeros of P_{m+1}, i.e. the eigenvalues of T^{[m]}, from the decreasing
/// approximations `approx`, Newton-polished on beta det B in W. Each step
/// is capped at a quarter of the gap to the neighbours.
template <class W, class Real>
std::vector<W> polished_zeros(const BandedMatrix<Real>& t, std::size_t m, const std::vector<Real>& approx) {
  using std::abs;
  const std::size_t p = t.upper_bandwidth();
  const DenseMatrix<Real> xi = DenseMatrix<Real>::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  W scale(1);
  for (const Real& l : approx) scale = std::max<W>(scale, W(abs(l)));
  std::vector<W> out;
  for (std::size_t k = 0; k < approx.size(); ++k) {
    W gap = scale;
    if (k > 0) gap = std::min<W>(gap, W(approx[k - 1] - approx[k]));
    if (k + 1 < approx.size()) gap = std::min<W>(gap, W(approx[k] - approx[k + 1]));
    out.push_back(newton_polish(
        W(approx[k]), [&](const W& x) { return char_value(t, m, xi, x); }, scale, gap / 4));
  }
  return out;
}

}  // namespace detail

template <class W, class Real>
PointData<W> point_data(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& nu, const DenseMatrix<Real>& xi,
                        const W& x) {
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  PointData<W> out;
  const auto bd = type_two_family<Dual<W>>(t, xi, n + p, Dual<W>(x, W(1)));
  out.a = type_one_family<W>(t, nu, n + q - 1, x);
  out.b.assign(p, std::vector<W>(n + p));
  for (std::size_t f = 0; f < p; ++f)
    for (std::size_t m = 0; m < n + p; ++m) out.b[f][m] = bd[f][m].v;

  std::vector<std::vector<Dual<W>>> blk_n;
  std::vector<std::vector<Dual<W>>> blk_next;
  for (std::size_t i = 0; i < p; ++i) {
    blk_n.push_back(detail::family_row(bd, n + i));
    blk_next.push_back(detail::family_row(bd, n + 1 + i));
  }
  const W beta_n = beta_product_as<W>(t, n);
  const W beta_next = beta_product_as<W>(t, n + 1);
  const Dual<W> dn = detail::laplace_det(blk_n);
  const Dual<W> dnext = detail::laplace_det(blk_next);
  out.p_n = dn.v * beta_n;
  out.dp_n = dn.d * beta_n;
  out.p_next = dnext.v * beta_next;
  out.dp_next = dnext.d * beta_next;

  std::vector<std::vector<W>> rest_a;
  for (std::size_t i = 1; i < q; ++i) rest_a.push_back(detail::family_row(out.a, n + i));
  out.cof_a = detail::first_row_cofactors(rest_a, q);
  std::vector<std::vector<W>> rest_b;
  for (std::size_t i = 1; i < p; ++i) rest_b.push_back(detail::family_row(out.b, n + i));
  out.cof_b = detail::first_row_cofactors(rest_b, p);
  for (std::size_t m = 0; m <= n; ++m) {
    W qa(0);
    for (std::size_t f = 0; f < q; ++f) qa += out.a[f][m] * out.cof_a[f];
    W rb(0);
    for (std::size_t f = 0; f < p; ++f) rb += out.b[f][m] * out.cof_b[f];
    out.q.push_back(qa);
    out.r.push_back(rb);
  }
  return out;
}

template <class Real = double>
struct TruncationSpectrum {
  using Work = work_t<Real>;

  std::size_t n = 0;
  std::size_t upper = 0;
  std::size_t lower = 0;
  std::vector<Real> lambdas;  ///< strictly decreasing
  DenseMatrix<Real> w;        ///< row k is the left eigenvector w_k
  DenseMatrix<Real> u;        ///< column k is the right eigenvector u_k
  Real alpha = Real(1);
  Real beta = Real(1);
  Real uw_residual = Real(0);  ///< ||UW - I||_max
  Real wu_residual = Real(0);  ///< ||WU - I||_max
  DenseMatrix<Real> truncation;

  /// The same data kept in extended precision for the downstream checks.
  struct Extended {
    std::vector<Work> lambdas;
    DenseMatrix<Work> w;
    DenseMatrix<Work> u;
    DenseMatrix<Work> mu_cofactor;   ///< row k: alpha_N C_a / (P_N P'_{N+1}) at lambda_k
    DenseMatrix<Work> rho_cofactor;  ///< row k: beta_N D_b at lambda_k
  } ext;

  DenseMatrix<Real> diagonal() const {
    DenseVector<Real> d(static_cast<Eigen::Index>(lambdas.size()));
    for (std::size_t k = 0; k < lambdas.size(); ++k) d(static_cast<Eigen::Index>(k)) = lambdas[k];
    return d.asDiagonal();
  }
};

namespace detail {

/// Eigenvectors and cofactor values evaluated in W, stored in the
/// spectrum's extended type, with the UW and WU residuals.
template <class W, class Real>
void fill_eigenvectors(const BandedMatrix<Real>& t, const DenseMatrix<Real>& nu, const DenseMatrix<Real>& xi,
                       const std::vector<Real>& approx, TruncationSpectrum<Real>& out) {
  using E = typename TruncationSpectrum<Real>::Work;
  const std::size_t n = out.n;
  const std::size_t p = out.upper;
  const std::size_t q = out.lower;
  const std::size_t dim = n + 1;
  const auto idim = static_cast<Eigen::Index>(dim);
  out.ext.w.resize(idim, idim);
  out.ext.u.resize(idim, idim);
  out.ext.mu_cofactor.resize(idim, static_cast<Eigen::Index>(q));
  out.ext.rho_cofactor.resize(idim, static_cast<Eigen::Index>(p));
  out.ext.lambdas.clear();
  const W alpha = alpha_product_as<W>(t, n);
  const W beta = beta_product_as<W>(t, n);
  const auto lambdas = polished_zeros<W>(t, n, approx);

  for (std::size_t k = 0; k < dim; ++k) {
    const auto pd = point_data(t, n, nu, xi, lambdas[k]);
    const W denom = pd.p_n * pd.dp_next;
    if (denom == W(0)) throw NumericalError("truncation_spectrum: P_N vanishes at an eigenvalue of T^[N]");
    const auto ik = static_cast<Eigen::Index>(k);
    for (std::size_t m = 0; m < dim; ++m) {
      out.ext.w(ik, static_cast<Eigen::Index>(m)) = E(W(alpha * pd.q[m] / denom));
      out.ext.u(static_cast<Eigen::Index>(m), ik) = E(W(beta * pd.r[m]));
    }
    for (std::size_t f = 0; f < q; ++f)
      out.ext.mu_cofactor(ik, static_cast<Eigen::Index>(f)) = E(W(alpha * pd.cof_a[f] / denom));
    for (std::size_t f = 0; f < p; ++f) out.ext.rho_cofactor(ik, static_cast<Eigen::Index>(f)) = E(W(beta * pd.cof_b[f]));
    out.ext.lambdas.push_back(E(lambdas[k]));
  }
  const DenseMatrix<E> id = DenseMatrix<E>::Identity(idim, idim);
  out.uw_residual = static_cast<Real>(max_abs(DenseMatrix<E>(out.ext.u * out.ext.w - id)));
  out.wu_residual = static_cast<Real>(max_abs(DenseMatrix<E>(out.ext.w * out.ext.u - id)));
}

}  // namespace detail

/// Eigenvalues of T^{[N]} with left and right eigenvectors from the
/// determinantal formulas
///   w_{k,m} = alpha_N Q_{m-1,N}(lambda_k) / (P_N(lambda_k) P'_{N+1}(lambda_k)),
///   u_{k,m} = beta_N R_{m-1,N}(lambda_k).
/// Eigenvalues are located with the dense eigensolver and Newton-refined
/// on P_{N+1}; all pointwise values are computed in 50 digits, and again in
/// 100 when the residuals come within a factor 1000 of `tol`. Throws
/// DegenerateSpectrum for (numerically) repeated eigenvalues, NumericalError
/// for complex eigenvalues or when UW = WU = I fails by more than `tol`.
template <class Real>
TruncationSpectrum<Real> banded_spectrum(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& nu,
                                         const DenseMatrix<Real>& xi, Real tol = Real(1e-7)) {
  using std::abs;
  const std::size_t p = t.upper_bandwidth();
  const std::size_t q = t.lower_bandwidth();
  detail::require_size(t.size(), n + std::max(p + 1, q), "truncation_spectrum");
  detail::check_start_matrix(nu, q, "nu");
  detail::check_start_matrix(xi, p, "xi");

  TruncationSpectrum<Real> out;
  out.n = n;
  out.upper = p;
  out.lower = q;
  out.truncation = t.truncate(n);
  out.alpha = alpha_product(t, n);
  out.beta = beta_product(t, n);
  const std::vector<Real> approx = real_spectrum(out.truncation, "truncation_spectrum");
  Real lam_scale(1);
  for (const Real& l : approx) lam_scale = std::max<Real>(lam_scale, abs(l));
  require_simple(approx, lam_scale, Real(1e-10), "truncation_spectrum");

  bool done = false;
  if constexpr (std::numeric_limits<Real>::digits < std::numeric_limits<Wide>::digits) {
    detail::fill_eigenvectors<Wide>(t, nu, xi, approx, out);
    done = std::max(out.uw_residual, out.wu_residual) <= tol / Real(1000);
  }
  if (!done) detail::fill_eigenvectors<typename TruncationSpectrum<Real>::Work>(t, nu, xi, approx, out);

  out.lambdas.clear();
  for (const auto& l : out.ext.lambdas) out.lambdas.push_back(static_cast<Real>(l));
  out.w = out.ext.w.template cast<Real>();
  out.u = out.ext.u.template cast<Real>();
  if (!(out.uw_residual <= tol) || !(out.wu_residual <= tol))
    throw NumericalError("truncation_spectrum: UW = WU = I fails (N = " + std::to_string(n) + ", residuals " +
                         detail::sci(out.uw_residual) + ", " + detail::sci(out.wu_residual) + ")");
  return out;
}

template <class Real>
TruncationSpectrum<Real> truncation_spectrum(const BandedMatrix<Real>& t, std::size_t n, const InitialConditions<Real>& ic = {},
                                             Real tol = Real(1e-7)) {
  if (t.upper_bandwidth() != 2 || t.lower_bandwidth() != 3)
    throw std::invalid_argument("truncation_spectrum: expected 2 superdiagonals and 3 subdiagonals");
  return banded_spectrum(t, n, ic.nu(), ic.xi(), tol);
}

/// max_{n <= n_max} ||U D^n W - (T^{[N]})^n||_max / max(1, ||T^{[N]}||_inf)^n,
/// evaluated in extended precision.
template <class Real>
std::vector<Real> spectral_power_residuals(const TruncationSpectrum<Real>& s, std::size_t n_max) {
  using W = work_t<Real>;
  const auto dim = static_cast<Eigen::Index>(s.n + 1);
  const DenseMatrix<W> t = s.truncation.template cast<W>();
  const W norm = std::max<W>(W(1), norm_inf(t));
  DenseMatrix<W> power = DenseMatrix<W>::Identity(dim, dim);
  DenseMatrix<W> ud = s.ext.u;
  W scale(1);
  std::vector<Real> out;
  for (std::size_t k = 0; k <= n_max; ++k) {
    out.push_back(static_cast<Real>(max_abs(DenseMatrix<W>(ud * s.ext.w - power)) / scale));
    power = power * t;
    for (Eigen::Index c = 0; c < dim; ++c) ud.col(c) *= s.ext.lambdas[static_cast<std::size_t>(c)];
    scale *= norm;
  }
  return out;
}

template <class Real = double>
struct ChristoffelNumbers {
  DenseMatrix<Real> mu;   ///< row k: mu_{k,1..q}
  DenseMatrix<Real> rho;  ///< row k: rho_{k,1..p}
  /// Largest relative disagreement with the cofactor (minor) formulas.
  Real cofactor_mismatch = Real(0);
  DenseMatrix<work_t<Real>> mu_ext;
  DenseMatrix<work_t<Real>> rho_ext;
};

/// mu_k = nu^{-1} w_{k,1..q}, rho_k = xi^{-1} u_{k,1..p}, cross-checked against
/// the cofactor formulas (mu_{k,1} = alpha_N |A^2 A^3; ...| / (P'_{N+1} P_N) etc).
template <class Real>
ChristoffelNumbers<Real> christoffel_numbers(const TruncationSpectrum<Real>& s, const DenseMatrix<Real>& nu,
                                             const DenseMatrix<Real>& xi, Real tol = Real(1e-8)) {
  using W = work_t<Real>;
  using std::abs;
  const std::size_t dim = s.n + 1;
  const std::size_t p = s.upper;
  const std::size_t q = s.lower;
  if (dim < std::max(p, q))
    throw std::invalid_argument("christoffel_numbers: the truncation is smaller than the initial-condition block");
  const DenseMatrix<W> nu_inv = nu.template cast<W>().inverse();
  const DenseMatrix<W> xi_inv = xi.template cast<W>().inverse();
  ChristoffelNumbers<Real> out;
  out.mu_ext = s.ext.w.leftCols(static_cast<Eigen::Index>(q)) * nu_inv.transpose();
  out.rho_ext = s.ext.u.topRows(static_cast<Eigen::Index>(p)).transpose() * xi_inv.transpose();
  W worst(0);
  auto compare = [&](const DenseMatrix<W>& a, const DenseMatrix<W>& b) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const W row_scale = b.row(i).cwiseAbs().maxCoeff();
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const W denom = std::max<W>(abs(b(i, j)), row_scale * W(std::numeric_limits<Real>::epsilon()));
        if (denom > W(0)) worst = std::max<W>(worst, abs(a(i, j) - b(i, j)) / denom);
      }
    }
  };
  compare(out.mu_ext, s.ext.mu_cofactor);
  compare(out.rho_ext, s.ext.rho_cofactor);
  out.cofactor_mismatch = static_cast<Real>(worst);
  out.mu = out.mu_ext.template cast<Real>();
  out.rho = out.rho_ext.template cast<Real>();
  if (!(out.cofactor_mismatch <= tol))
    throw NumericalError("christoffel_numbers: cofactor formulas disagree (relative " + detail::sci(out.cofactor_mismatch) + ")");
  return out;
}

/// For (2,3) truncations with N >= 2 (the 3 x 3 block of nu needs three
/// left-eigenvector entries; smaller N use the cofactor values directly).
template <class Real>
ChristoffelNumbers<Real> christoffel_numbers(const TruncationSpectrum<Real>& s, const InitialConditions<Real>& ic = {},
                                             Real tol = Real(1e-8)) {
  if (s.n + 1 >= 3) return christoffel_numbers(s, ic.nu(), ic.xi(), tol);
  ChristoffelNumbers<Real> out;
  out.mu_ext = s.ext.mu_cofactor;
  out.rho_ext = s.ext.rho_cofactor;
  out.mu = out.mu_ext.template cast<Real>();
  out.rho = out.rho_ext.template cast<Real>();
  return out;
}

template <class Real = double>
struct DiscreteMeasureMatrix {
  std::vector<Real> support;                 ///< lambda_k, decreasing
  std::vector<DenseMatrix<Real>> weights;    ///< rho_k mu_k^T, p x q, rank one
  DenseMatrix<Real> total;                   ///< sum of the weights
  DenseMatrix<Real> expected;                ///< xi^{-1} I_{p,q} nu^{-T}
  /// Entries with d_{b,a}(N) >= 0; only there does the total mass match.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> checked;
  Real mass_residual = Real(0);

  /// psi_{b,a}(x) = sum of the (b,a) weights at nodes lambda_k <= x.
  Real step(std::size_t b, std::size_t a, Real x) const {
    Real acc(0);
    for (std::size_t k = 0; k < support.size(); ++k)
      if (support[k] <= x) acc += weights[k](static_cast<Eigen::Index>(b - 1), static_cast<Eigen::Index>(a - 1));
    return acc;
  }
};

template <class Real>
DiscreteMeasureMatrix<Real> discrete_measure(const TruncationSpectrum<Real>& s, const ChristoffelNumbers<Real>& c,
                                             const DenseMatrix<Real>& nu, const DenseMatrix<Real>& xi, Real tol = Real(1e-8)) {
  using W = work_t<Real>;
  using std::abs;
  const std::size_t p = s.upper;
  const std::size_t q = s.lower;
  const auto ip = static_cast<Eigen::Index>(p);
  const auto iq = static_cast<Eigen::Index>(q);
  DiscreteMeasureMatrix<Real> out;
  out.support = s.lambdas;
  DenseMatrix<W> total = DenseMatrix<W>::Zero(ip, iq);
  DenseMatrix<W> abs_total = DenseMatrix<W>::Zero(ip, iq);
  for (std::size_t k = 0; k < s.lambdas.size(); ++k) {
    const auto ik = static_cast<Eigen::Index>(k);
    const DenseMatrix<W> wk = c.rho_ext.row(ik).transpose() * c.mu_ext.row(ik);
    out.weights.push_back(wk.template cast<Real>());
    total += wk;
    abs_total += wk.cwiseAbs();
  }
  out.total = total.template cast<Real>();
  const DenseMatrix<W> id = DenseMatrix<W>::Identity(ip, iq);
  const DenseMatrix<W> expected = xi.template cast<W>().inverse() * id * nu.template cast<W>().inverse().transpose();
  out.expected = expected.template cast<Real>();
  out.checked.resize(ip, iq);
  W worst(0);
  for (Eigen::Index b = 0; b < ip; ++b)
    for (Eigen::Index a = 0; a < iq; ++a) {
      out.checked(b, a) = degree_of_precision(s.n, static_cast<std::size_t>(a + 1), static_cast<std::size_t>(b + 1), p, q) >= 0;
      if (!out.checked(b, a)) continue;
      const W scale = std::max<W>(W(1), abs_total(b, a));
      worst = std::max<W>(worst, abs(total(b, a) - expected(b, a)) / scale);
    }
  out.mass_residual = static_cast<Real>(worst);
  if (!(out.mass_residual <= tol))
    throw NumericalError("discrete_measure: total mass differs from xi^{-1} I nu^{-T} (residual " +
                         detail::sci(out.mass_residual) + ")");
  return out;
}

template <class Real>
DiscreteMeasureMatrix<Real> discrete_measure(const TruncationSpectrum<Real>& s, const ChristoffelNumbers<Real>& c,
                                             const InitialConditions<Real>& ic = {}, Real tol = Real(1e-8)) {
  return discrete_measure(s, c, ic.nu(), ic.xi(), tol);
}

/// max_{n,m <= N} |sum_k B_n(lambda_k) rho_k mu_k^T A_m(lambda_k)^T - delta_{n,m}|,
/// with the row vectors B_n = (B^b_n) and A_m = (A^a_m) evaluated at the
/// stored eigenvalues in extended precision.
template <class Real>
Real discrete_biorthogonality(const BandedMatrix<Real>& t, const TruncationSpectrum<Real>& s, const ChristoffelNumbers<Real>& c,
                              const DenseMatrix<Real>& nu, const DenseMatrix<Real>& xi) {
  using W = work_t<Real>;
  using std::abs;
  const std::size_t n = s.n;
  const std::size_t dim = n + 1;
  const auto idim = static_cast<Eigen::Index>(dim);
  // Columns k: (B_m(lambda_k) . rho_k) and (A_m(lambda_k) . mu_k).
  DenseMatrix<W> right(idim, idim), left(idim, idim);
  for (std::size_t k = 0; k < dim; ++k) {
    const W& lam = s.ext.lambdas[k];
    const auto b = type_two_family<W>(t, xi, n, lam);
    const auto a = type_one_family<W>(t, nu, n, lam);
    const auto ik = static_cast<Eigen::Index>(k);
    for (std::size_t m = 0; m < dim; ++m) {
      W rb(0), la(0);
      for (std::size_t f = 0; f < b.size(); ++f) rb += b[f][m] * c.rho_ext(ik, static_cast<Eigen::Index>(f));
      for (std::size_t f = 0; f < a.size(); ++f) la += a[f][m] * c.mu_ext(ik, static_cast<Eigen::Index>(f));
      right(static_cast<Eigen::Index>(m), ik) = rb;
      left(static_cast<Eigen::Index>(m), ik) = la;
    }
  }
  const DenseMatrix<W> gram = right * left.transpose() - DenseMatrix<W>::Identity(idim, idim);
  return static_cast<Real>(max_abs(gram));
}

template <class Real>
Real discrete_biorthogonality(const BandedMatrix<Real>& t, const TruncationSpectrum<Real>& s, const ChristoffelNumbers<Real>& c,
                              const InitialConditions<Real>& ic = {}) {
  return discrete_biorthogonality(t, s, c, ic.nu(), ic.xi());
}

namespace detail {

/// det(x I - M) and its derivative det * trace((x I - M)^{-1}), by LU.
template <class W>
std::pair<W, W> dense_char_value(const DenseMatrix<W>& m, const W& x) {
  if (m.rows() == 0) return {W(1), W(0)};
  const DenseMatrix<W> a = DenseMatrix<W>::Identity(m.rows(), m.cols()) * x - m;
  Eigen::PartialPivLU<DenseMatrix<W>> lu(a);
  const W det = lu.determinant();
  if (det == W(0)) return {det, W(0)};
  const W tr = lu.inverse().trace();
  return {det, det * tr};
}

}  // namespace detail

template <class Real = double>
struct GeneralizedCd {
  Real lhs = Real(0);        ///< sum_{n<=N} Q_{n,N}(x) R_{n,N}(y)
  Real rhs = Real(0);        ///< (P_{N+1}(x)P_N(y) - P_N(x)P_{N+1}(y)) / (alpha beta (x - y))
  Real residual = Real(0);   ///< |lhs - rhs| / scale
  Real scale = Real(0);
  Real confluent_lhs = Real(0);   ///< sum Q_{n,N}(x) R_{n,N}(x)
  Real confluent_rhs = Real(0);   ///< (P'_{N+1}P_N - P'_N P_{N+1})(x) / (alpha beta)
  Real confluent_residual = Real(0);
  Real kernel = Real(0);          ///< alpha beta sum Q R at (x, x); positive for oscillatory T
};

/// Generalized Christoffel-Darboux check. The left side uses the
/// recursion families; the right side uses characteristic polynomials
/// evaluated from the dense truncations by LU.
template <class Real>
GeneralizedCd<Real> generalized_cd_check(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& nu,
                                         const DenseMatrix<Real>& xi, Real x, Real y) {
  using W = work_t<Real>;
  using std::abs;
  const auto px = point_data(t, n, nu, xi, W(x));
  const auto py = point_data(t, n, nu, xi, W(y));
  const W ab = alpha_product_as<W>(t, n) * beta_product_as<W>(t, n);
  const DenseMatrix<W> big = t.truncate(n).template cast<W>();
  const DenseMatrix<W> small = n == 0 ? DenseMatrix<W>(0, 0) : DenseMatrix<W>(big.topLeftCorner(n, n));
  const auto [pnx, dpnx] = detail::dense_char_value(small, W(x));
  const auto [pny, dpny] = detail::dense_char_value(small, W(y));
  const auto [p1x, dp1x] = detail::dense_char_value(big, W(x));
  const auto [p1y, dp1y] = detail::dense_char_value(big, W(y));
  (void)dpny;
  (void)dp1y;

  W lhs(0), abs_lhs(0), conf(0), abs_conf(0);
  for (std::size_t m = 0; m <= n; ++m) {
    lhs += px.q[m] * py.r[m];
    abs_lhs += abs(px.q[m] * py.r[m]);
    conf += px.q[m] * px.r[m];
    abs_conf += abs(px.q[m] * px.r[m]);
  }
  GeneralizedCd<Real> out;
  out.lhs = static_cast<Real>(lhs);
  if (x != y) {
    const W rhs = (p1x * pny - pnx * p1y) / (ab * (W(x) - W(y)));
    const W rscale = (abs(p1x * pny) + abs(pnx * p1y)) / abs(ab * (W(x) - W(y)));
    const W scale = std::max<W>(std::max<W>(abs_lhs, rscale), std::numeric_limits<W>::min());
    out.rhs = static_cast<Real>(rhs);
    out.scale = static_cast<Real>(scale);
    out.residual = static_cast<Real>(abs(lhs - rhs) / scale);
  }
  const W crhs = (dp1x * pnx - dpnx * p1x) / ab;
  const W cscale = std::max<W>(std::max<W>(abs_conf, (abs(dp1x * pnx) + abs(dpnx * p1x)) / abs(ab)), std::numeric_limits<W>::min());
  out.confluent_lhs = static_cast<Real>(conf);
  out.confluent_rhs = static_cast<Real>(crhs);
  out.confluent_residual = static_cast<Real>(abs(conf - crhs) / cscale);
  out.kernel = static_cast<Real>(ab * conf);
  if (x == y) {
    out.rhs = out.confluent_rhs;
    out.scale = static_cast<Real>(cscale);
    out.residual = out.confluent_residual;
  }
  return out;
}

template <class Real>
GeneralizedCd<Real> generalized_cd_check(const BandedMatrix<Real>& t, std::size_t n, const InitialConditions<Real>& ic, Real x,
                                         Real y) {
  return generalized_cd_check(t, n, ic.nu(), ic.xi(), x, y);
}

template <class Real = double>
struct InterlacingReport {
  std::size_t n = 0;
  std::vector<Real> zeros_next;  ///< zeros of P_{N+1}, decreasing
  std::vector<Real> zeros;       ///< zeros of P_N, decreasing
  bool interlaced = true;
  bool wronskian_positive = true;
  bool signs_at_zeros = true;
  Real min_wronskian = std::numeric_limits<Real>::infinity();  ///< smallest sampled W(x)
  std::vector<Real> grid;
  std::vector<Real> wronskian;  ///< P'_{N+1}P_N - P'_N P_{N+1} on the grid
  std::optional<Real> witness;  ///< first point where a property failed
  std::string violation;

  bool ok() const { return interlaced && wronskian_positive && signs_at_zeros; }
};

namespace detail {

/// (P_N, P_{N+1}) with derivatives at x, from beta_m det B_m.
template <class W, class Real>
std::pair<Dual<W>, Dual<W>> char_pair(const BandedMatrix<Real>& t, std::size_t n, const DenseMatrix<Real>& xi, const W& x) {
  const std::size_t p = t.upper_bandwidth();
  const auto bd = type_two_family<Dual<W>>(t, xi, n + p, Dual<W>(x, W(1)));
  std::vector<std::vector<Dual<W>>> blk_n, blk_next;
  for (std::size_t i = 0; i < p; ++i) {
    blk_n.push_back(family_row(bd, n + i));
    blk_next.push_back(family_row(bd, n + 1 + i));
  }
  return {laplace_det(blk_n) * beta_product_as<W>(t, n), laplace_det(blk_next) * beta_product_as<W>(t, n + 1)};
}

template <class W, class Real>
InterlacingReport<Real> interlacing_in(const BandedMatrix<Real>& t, std::size_t n, std::size_t samples) {
  const std::size_t p = t.upper_bandwidth();
  using std::abs;
  const DenseMatrix<Real> xi = identity_start<Real>(p, t.lower_bandwidth()).second;
  InterlacingReport<Real> out;
  out.n = n;
  const auto zn = detail::polished_zeros<W>(t, n, real_spectrum(t.truncate(n), "interlacing_check"));
  const auto zp = n > 0 ? detail::polished_zeros<W>(t, n - 1, real_spectrum(t.truncate(n - 1), "interlacing_check"))
                        : std::vector<W>{};
  for (const W& z : zn) out.zeros_next.push_back(static_cast<Real>(z));
  for (const W& z : zp) out.zeros.push_back(static_cast<Real>(z));

  auto fail = [&](bool& flag, Real x, std::string what) {
    if (flag && !out.witness) {
      out.witness = x;
      out.violation = std::move(what);
    }
    flag = false;
  };
  for (std::size_t k = 0; k < zp.size(); ++k) {
    if (!(zn[k] > zp[k] && zp[k] > zn[k + 1]))
      fail(out.interlaced, out.zeros[k], "zero " + std::to_string(k) + " of P_N is not strictly between consecutive zeros of P_{N+1}");
  }

  // Wronskian through P_m = beta_m det B_m with forward-mode derivatives.
  auto values = [&](const W& x) { return char_pair(t, n, xi, x); };

  const Real hi = out.zeros_next.front();
  const Real lo = out.zeros_next.back();
  const Real pad = Real(0.05) * (hi - lo) + Real(1e-3) * (Real(1) + std::max<Real>(abs(hi), abs(lo)));
  for (std::size_t i = 0; i < samples; ++i) {
    const Real x = samples == 1 ? (hi + lo) / 2 : (lo - pad) + (hi - lo + 2 * pad) * Real(i) / Real(samples - 1);
    const auto [pn, pnext] = values(W(x));
    const W wr = pnext.d * pn.v - pn.d * pnext.v;
    const Real wv = static_cast<Real>(wr);
    out.grid.push_back(x);
    out.wronskian.push_back(wv);
    out.min_wronskian = std::min(out.min_wronskian, wv);
    if (!(wr > W(0))) fail(out.wronskian_positive, x, "Wronskian is not positive");
  }
  for (const W& lam : zn) {
    const auto [pn, pnext] = values(lam);
    if (!(pnext.d * pn.v > W(0)))
      fail(out.signs_at_zeros, static_cast<Real>(lam), "P'_{N+1} P_N is not positive at a zero of P_{N+1}");
  }
  for (const W& th : zp) {
    const auto [pn, pnext] = values(th);
    if (!(pnext.v * pn.d < W(0)))
      fail(out.signs_at_zeros, static_cast<Real>(th), "P_{N+1} P'_N is not negative at a zero of P_N");
  }
  return out;
}

}  // namespace detail

/// Interlacing of the zeros of P_{N+1} and P_N, positivity of the Wronskian
/// P'_{N+1}P_N - P'_N P_{N+1} on `samples` grid points spanning the zeros,
/// and the signs of P'_{N+1}P_N and P_{N+1}P'_N at the respective zeros.
/// Zeros are Newton-polished and everything is evaluated in quad
/// precision; a reported violation is confirmed in 100 digits.
/// P'_{N+1}(x) P_N(x) - P'_N(x) P_{N+1}(x).
template <class Real>
Real wronskian(const BandedMatrix<Real>& t, std::size_t n, Real x) {
  using W = work_t<Real>;
  const auto xi = identity_start<Real>(t.upper_bandwidth(), t.lower_bandwidth()).second;
  const auto [pn, pnext] = detail::char_pair(t, n, xi, W(x));
  return static_cast<Real>(W(pnext.d * pn.v - pn.d * pnext.v));
}

template <class Real>
InterlacingReport<Real> interlacing_check(const BandedMatrix<Real>& t, std::size_t n, std::size_t samples = 100) {
  if constexpr (std::numeric_limits<Real>::digits < std::numeric_limits<Quad>::digits) {
    auto quick = detail::interlacing_in<Quad>(t, n, samples);
    if (quick.ok()) return quick;
  }
  return detail::interlacing_in<work_t<Real>>(t, n, samples);
}

}  // namespace favard
