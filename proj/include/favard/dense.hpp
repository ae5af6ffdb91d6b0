#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "favard/errors.hpp"
#include "favard/poly.hpp"

namespace favard {

template <class Real = double>
using DenseMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real = double>
using DenseVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
Real max_abs(const DenseMatrix<Real>& m) {
  return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

template <class Real>
void require_finite(const DenseMatrix<Real>& m, const char* what) {
  using std::isfinite;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (!isfinite(m.data()[i])) throw std::domain_error(std::string(what) + ": non-finite matrix entry");
}

/// det(xI - M), monic. The matrix is reduced to upper Hessenberg form and
/// the determinant expanded with the Hessenberg minor recurrence.
template <class Real>
Poly<Real> dense_charpoly(const DenseMatrix<Real>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("dense_charpoly: matrix is not square");
  require_finite(m, "dense_charpoly");
  const Eigen::Index n = m.rows();
  if (n == 0) return Poly<Real>::constant(Real(1));

  DenseMatrix<Real> h;
  if (n <= 2) {
    h = m;
  } else {
    Eigen::HessenbergDecomposition<DenseMatrix<Real>> hd(m);
    h = hd.matrixH();
  }

  // p[i] = charpoly of the leading i x i block.
  std::vector<Poly<Real>> p;
  p.reserve(static_cast<std::size_t>(n) + 1);
  p.push_back(Poly<Real>::constant(Real(1)));
  for (Eigen::Index i = 1; i <= n; ++i) {
    Poly<Real> next = Poly<Real>{-h(i - 1, i - 1), Real(1)} * p[static_cast<std::size_t>(i - 1)];
    Real subprod(1);
    for (Eigen::Index k = 1; k < i; ++k) {
      subprod *= h(i - k, i - k - 1);
      next -= (h(i - 1 - k, i - 1) * subprod) * p[static_cast<std::size_t>(i - 1 - k)];
    }
    p.push_back(std::move(next));
  }
  return p.back().normalized();
}

template <class Real = double>
struct EigenResult {
  /// Sorted by descending real part, ties by descending imaginary part.
  std::vector<std::complex<Real>> values;
  /// Eigenvalue condition numbers |x| |y| / |y^H x|; infinite when the
  /// eigenvector matrix is numerically singular.
  std::vector<Real> condition;
  /// Smallest pairwise distance between computed eigenvalues.
  Real min_separation = std::numeric_limits<Real>::infinity();
};

template <class Real>
EigenResult<Real> dense_eig(const DenseMatrix<Real>& m) {
  using Complex = std::complex<Real>;
  if (m.rows() != m.cols()) throw std::invalid_argument("dense_eig: matrix is not square");
  require_finite(m, "dense_eig");
  const Eigen::Index n = m.rows();
  EigenResult<Real> out;
  if (n == 0) return out;

  Eigen::EigenSolver<DenseMatrix<Real>> es(m, true);
  if (es.info() != Eigen::Success) throw NumericalError("dense_eig: QR iteration did not converge");

  const auto vals = es.eigenvalues();
  const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> v = es.eigenvectors();
  Eigen::PartialPivLU<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>> lu(v);
  const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> vinv = lu.inverse();
  const Real rcond = lu.rcond();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (vals(a).real() != vals(b).real()) return vals(a).real() > vals(b).real();
    return vals(a).imag() > vals(b).imag();
  });

  for (Eigen::Index idx : order) {
    out.values.push_back(vals(idx));
    Real kappa = std::numeric_limits<Real>::infinity();
    if (rcond > std::numeric_limits<Real>::epsilon()) kappa = v.col(idx).norm() * vinv.row(idx).norm();
    out.condition.push_back(kappa);
  }
  for (std::size_t i = 0; i < out.values.size(); ++i)
    for (std::size_t j = i + 1; j < out.values.size(); ++j)
      out.min_separation = std::min<Real>(out.min_separation, std::abs(out.values[i] - out.values[j]));
  return out;
}

/// Real parts of dense_eig, requiring every imaginary part to be negligible.
template <class Real>
std::vector<Real> real_spectrum(const DenseMatrix<Real>& m, const char* context) {
  const EigenResult<Real> er = dense_eig(m);
  const Real scale = std::max<Real>(Real(1), max_abs(m));
  using std::abs;
  std::vector<Real> out;
  out.reserve(er.values.size());
  for (const auto& z : er.values) {
    if (abs(z.imag()) > Real(1e-9) * scale)
      throw NumericalError(std::string(context) + ": truncation has non-real eigenvalues");
    out.push_back(z.real());
  }
  std::sort(out.begin(), out.end(), std::greater<Real>());
  return out;
}

/// Throws DegenerateSpectrum when two sorted eigenvalues are closer than
/// rel_gap * scale.
template <class Real>
void require_simple(const std::vector<Real>& descending, Real scale, Real rel_gap, const char* context) {
  for (std::size_t i = 1; i < descending.size(); ++i) {
    if (descending[i - 1] - descending[i] < rel_gap * scale)
      throw DegenerateSpectrum(std::string(context) +
                               ": eigenvalues coincide to working precision; generalized eigenvectors "
                               "(Jordan chains) are not supported");
  }
}

}  // namespace favard
