#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "favard/dense.hpp"

namespace favard {

/// Finite section of a semi-infinite banded operator with `upper`
/// superdiagonals and `lower` subdiagonals.
///
/// Band offset d runs over [-lower, upper]. Band d is stored as a sequence
/// indexed by min(row, col): element k of band d >= 0 is entry (k, k + d),
/// element k of band d < 0 is entry (k - d, k). A band therefore holds
/// size() - |d| values.
template <class Real = double>
class BandedMatrix {
 public:
  BandedMatrix() = default;

  BandedMatrix(std::size_t upper, std::size_t lower, std::size_t size)
      : upper_(upper), lower_(lower), size_(size), bands_(upper + lower + 1) {
    for (int d = -static_cast<int>(lower); d <= static_cast<int>(upper); ++d)
      band_ref(d).assign(band_length(d), Real(0));
  }

  /// Samples entry(row, col) over the band for rows and columns < size.
  template <class Generator>
  static BandedMatrix from_generator(std::size_t upper, std::size_t lower, std::size_t size, Generator&& entry) {
    BandedMatrix t(upper, lower, size);
    for (int d = -static_cast<int>(lower); d <= static_cast<int>(upper); ++d) {
      auto& b = t.band_ref(d);
      for (std::size_t k = 0; k < b.size(); ++k) {
        const std::size_t r = d >= 0 ? k : k + static_cast<std::size_t>(-d);
        const std::size_t c = d >= 0 ? k + static_cast<std::size_t>(d) : k;
        b[k] = static_cast<Real>(entry(r, c));
      }
    }
    return t;
  }

  /// Builds from explicit band sequences ordered from offset -lower to +upper.
  static BandedMatrix from_bands(std::size_t upper, std::size_t lower, std::size_t size,
                                 const std::vector<std::vector<Real>>& bands) {
    if (bands.size() != upper + lower + 1) throw std::invalid_argument("BandedMatrix: wrong number of bands");
    BandedMatrix t(upper, lower, size);
    for (int d = -static_cast<int>(lower); d <= static_cast<int>(upper); ++d) {
      const auto& src = bands[static_cast<std::size_t>(d + static_cast<int>(lower))];
      if (src.size() != t.band_length(d))
        throw std::invalid_argument("BandedMatrix: band " + std::to_string(d) + " has length " +
                                    std::to_string(src.size()) + ", expected " +
                                    std::to_string(t.band_length(d)));
      t.band_ref(d) = src;
    }
    return t;
  }

  std::size_t upper_bandwidth() const { return upper_; }
  std::size_t lower_bandwidth() const { return lower_; }
  /// Number of represented rows (and columns).
  std::size_t size() const { return size_; }

  std::size_t band_length(int d) const {
    const std::size_t ad = static_cast<std::size_t>(d < 0 ? -d : d);
    return ad >= size_ ? 0 : size_ - ad;
  }

  const std::vector<Real>& band(int d) const {
    check_offset(d);
    return bands_[static_cast<std::size_t>(d + static_cast<int>(lower_))];
  }

  /// Entry (i, j); zero outside the band. Indices must be < size().
  Real operator()(std::size_t i, std::size_t j) const {
    if (i >= size_ || j >= size_)
      throw std::out_of_range("BandedMatrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside represented range " + std::to_string(size_));
    const long d = static_cast<long>(j) - static_cast<long>(i);
    if (d > static_cast<long>(upper_) || -d > static_cast<long>(lower_)) return Real(0);
    return bands_[static_cast<std::size_t>(d + static_cast<long>(lower_))][std::min(i, j)];
  }

  void set(std::size_t i, std::size_t j, Real value) {
    const long d = static_cast<long>(j) - static_cast<long>(i);
    if (i >= size_ || j >= size_ || d > static_cast<long>(upper_) || -d > static_cast<long>(lower_))
      throw std::out_of_range("BandedMatrix::set: position outside the band");
    bands_[static_cast<std::size_t>(d + static_cast<long>(lower_))][std::min(i, j)] = value;
  }

  /// Leading principal (N+1) x (N+1) submatrix.
  DenseMatrix<Real> truncate(std::size_t n) const {
    if (n >= size_)
      throw std::out_of_range("truncate: N = " + std::to_string(n) + " outside represented range (size " +
                              std::to_string(size_) + ")");
    DenseMatrix<Real> m = DenseMatrix<Real>::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
    for (std::size_t i = 0; i <= n; ++i) {
      const std::size_t lo = i >= lower_ ? i - lower_ : 0;
      const std::size_t hi = std::min(n, i + upper_);
      for (std::size_t j = lo; j <= hi; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j);
    }
    return m;
  }

  BandedMatrix shifted(Real s) const {
    BandedMatrix t = *this;
    for (Real& v : t.band_ref(0)) v += s;
    return t;
  }

  Real max_abs_entry() const {
    using std::abs;
    Real m(0);
    for (const auto& b : bands_)
      for (const Real& v : b) m = std::max<Real>(m, abs(v));
    return m;
  }

  bool all_finite() const {
    using std::isfinite;
    for (const auto& b : bands_)
      for (const Real& v : b)
        if (!isfinite(v)) return false;
    return true;
  }

  /// Same matrix with entries converted to another scalar type.
  template <class To>
  BandedMatrix<To> cast() const {
    return BandedMatrix<To>::from_generator(upper_, lower_, size_,
                                            [&](std::size_t r, std::size_t c) { return To((*this)(r, c)); });
  }

  friend bool operator==(const BandedMatrix&, const BandedMatrix&) = default;

 private:
  void check_offset(int d) const {
    if (d > static_cast<int>(upper_) || -d > static_cast<int>(lower_))
      throw std::out_of_range("BandedMatrix: band offset " + std::to_string(d) + " outside the band");
  }

  std::vector<Real>& band_ref(int d) {
    check_offset(d);
    return bands_[static_cast<std::size_t>(d + static_cast<int>(lower_))];
  }

  std::size_t upper_ = 0;
  std::size_t lower_ = 0;
  std::size_t size_ = 0;
  std::vector<std::vector<Real>> bands_;
};

template <class Real>
DenseMatrix<Real> truncate(const BandedMatrix<Real>& t, std::size_t n) {
  return t.truncate(n);
}

template <class Real>
BandedMatrix<Real> shift(const BandedMatrix<Real>& t, Real s) {
  return t.shifted(s);
}

/// ||M||_1, the maximum absolute column sum.
template <class Real>
Real norm_one(const DenseMatrix<Real>& m) {
  return m.size() == 0 ? Real(0) : m.cwiseAbs().colwise().sum().maxCoeff();
}

/// ||M||_inf, the maximum absolute row sum.
template <class Real>
Real norm_inf(const DenseMatrix<Real>& m) {
  return m.size() == 0 ? Real(0) : m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Tridiagonal matrix with diagonal m_n, unit superdiagonal and
/// subdiagonal entry (n, n-1) = ell[n]; ell[0] is the unused ell_0 = 1 slot.
template <class Real>
BandedMatrix<Real> tridiagonal_banded(const std::vector<Real>& diag, const std::vector<Real>& ell) {
  if (diag.size() != ell.size()) throw std::invalid_argument("tridiagonal_banded: diagonal/subdiagonal size mismatch");
  const std::size_t n = diag.size();
  return BandedMatrix<Real>::from_generator(1, 1, n, [&](std::size_t r, std::size_t c) -> Real {
    if (r == c) return diag[r];
    if (c == r + 1) return Real(1);
    return ell[r];
  });
}

}  // namespace favard
