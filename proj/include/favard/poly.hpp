#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace favard {

/// Dense univariate polynomial with real coefficients stored in ascending
/// degree. The zero polynomial has an empty coefficient list; construction
/// drops exact trailing zeros only. Use normalized() to also drop trailing
/// coefficients that are negligible relative to the largest one.
template <class Real = double>
class Poly {
 public:
  using value_type = Real;

  Poly() = default;
  explicit Poly(std::vector<Real> coeffs) : c_(std::move(coeffs)) { drop_exact_zeros(); }
  Poly(std::initializer_list<Real> coeffs) : Poly(std::vector<Real>(coeffs)) {}

  static Poly constant(Real v) { return Poly(std::vector<Real>{v}); }

  static Poly monomial(std::size_t power, Real scale = Real(1)) {
    std::vector<Real> c(power + 1, Real(0));
    c[power] = scale;
    return Poly(std::move(c));
  }

  /// The polynomial `x`.
  static Poly identity() { return monomial(1); }

  bool is_zero() const { return c_.empty(); }

  /// Degree, with -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  const std::vector<Real>& coeffs() const { return c_; }
  Real coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Real(0); }
  Real leading() const { return c_.empty() ? Real(0) : c_.back(); }

  Real max_abs_coeff() const {
    using std::abs;
    Real m(0);
    for (const Real& v : c_) m = std::max<Real>(m, abs(v));
    return m;
  }

  /// Horner evaluation. X may be Real or std::complex<Real>.
  template <class X>
  X operator()(const X& x) const {
    X acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + X(*it);
    return acc;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<Real> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = Real(k) * c_[k];
    return Poly(std::move(d));
  }

  Poly times_x() const {
    if (c_.empty()) return Poly();
    std::vector<Real> s(c_.size() + 1, Real(0));
    std::copy(c_.begin(), c_.end(), s.begin() + 1);
    return Poly(std::move(s));
  }

  /// Drops trailing coefficients with |c| <= rel_tol * max|c|.
  Poly normalized(Real rel_tol = Real(1e-12)) const {
    const Real cut = rel_tol * max_abs_coeff();
    std::vector<Real> c = c_;
    using std::abs;
    while (!c.empty() && abs(c.back()) <= cut) c.pop_back();
    return Poly(std::move(c));
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Real(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    drop_exact_zeros();
    return *this;
  }

  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Real(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    drop_exact_zeros();
    return *this;
  }

  Poly& operator*=(Real s) {
    for (Real& v : c_) v *= s;
    drop_exact_zeros();
    return *this;
  }

  Poly& operator/=(Real s) {
    for (Real& v : c_) v /= s;
    drop_exact_zeros();
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, Real s) { return a *= s; }
  friend Poly operator*(Real s, Poly a) { return a *= s; }
  friend Poly operator/(Poly a, Real s) { return a /= s; }
  friend Poly operator-(Poly a) { return a *= Real(-1); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<Real> r(a.c_.size() + b.c_.size() - 1, Real(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(r));
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

  friend std::ostream& operator<<(std::ostream& os, const Poly& p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (std::size_t k = p.c_.size(); k-- > 0;) {
      if (p.c_[k] == Real(0)) continue;
      if (!first) os << (p.c_[k] < 0 ? " - " : " + ");
      else if (p.c_[k] < 0) os << "-";
      os << std::abs(p.c_[k]);
      if (k > 0) os << "*x";
      if (k > 1) os << "^" << k;
      first = false;
    }
    return os;
  }

 private:
  void drop_exact_zeros() {
    while (!c_.empty() && c_.back() == Real(0)) c_.pop_back();
  }

  std::vector<Real> c_;
};

template <class Real, class X>
X poly_eval(const Poly<Real>& p, const X& x) {
  return p(x);
}

template <class Real>
Poly<Real> poly_derivative(const Poly<Real>& p) {
  return p.derivative();
}

/// max_k |a_k - b_k| / max(max|a|, max|b|); zero when both are zero.
/// Coefficient-wise conversion between scalar types.
template <class To, class From>
Poly<To> poly_cast(const Poly<From>& p) {
  std::vector<To> c;
  c.reserve(p.coeffs().size());
  for (const From& v : p.coeffs()) c.push_back(static_cast<To>(v));
  return Poly<To>(std::move(c));
}

template <class Real>
Real relative_coeff_distance(const Poly<Real>& a, const Poly<Real>& b) {
  const std::size_t n = std::max(a.coeffs().size(), b.coeffs().size());
  Real diff(0);
  using std::abs;
  for (std::size_t k = 0; k < n; ++k) diff = std::max<Real>(diff, abs(a.coeff(k) - b.coeff(k)));
  const Real scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  return scale > Real(0) ? diff / scale : diff;
}

/// Monic polynomial with the given real roots; products are evaluated
/// factor by factor so values stay accurate near clustered roots.
template <class Real = double>
class RootProduct {
 public:
  RootProduct() = default;
  explicit RootProduct(std::vector<Real> roots) : roots_(std::move(roots)) {}

  const std::vector<Real>& roots() const { return roots_; }
  std::size_t degree() const { return roots_.size(); }

  template <class X>
  X operator()(const X& x) const {
    X acc(1);
    for (const Real& r : roots_) acc *= (x - X(r));
    return acc;
  }

  template <class X>
  X derivative(const X& x) const {
    X sum(0);
    for (std::size_t i = 0; i < roots_.size(); ++i) {
      X term(1);
      for (std::size_t j = 0; j < roots_.size(); ++j)
        if (j != i) term *= (x - X(roots_[j]));
      sum += term;
    }
    return sum;
  }

  /// Derivative at the i-th root: prod_{j != i} (r_i - r_j).
  Real derivative_at_root(std::size_t i) const {
    Real acc(1);
    for (std::size_t j = 0; j < roots_.size(); ++j)
      if (j != i) acc *= (roots_[i] - roots_[j]);
    return acc;
  }

  Poly<Real> expand() const {
    Poly<Real> p = Poly<Real>::constant(Real(1));
    for (const Real& r : roots_) p = p * Poly<Real>{-r, Real(1)};
    return p;
  }

 private:
  std::vector<Real> roots_;
};

}  // namespace favard
