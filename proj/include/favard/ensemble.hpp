#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "favard/bidiagonal.hpp"
#include "favard/jacobi.hpp"

namespace favard {

/// Seeded random factorization with every parameter uniform in [lo, hi].
/// Counts and shapes follow constant_factors.
template <class Real = double>
BidiagonalFactorization<Real> random_positive_factors(std::uint64_t seed, std::size_t upper, std::size_t lower,
                                                      std::size_t size, Real lo = Real(0.2), Real hi = Real(2)) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(static_cast<double>(lo), static_cast<double>(hi));
  auto f = constant_factors<Real>(upper, lower, size, Real(1));
  for (auto& l : f.lowers)
    for (Real& v : l) v = Real(u(rng));
  f.delta.clear();
  for (std::size_t i = 0; i < size; ++i) f.delta.push_back(Real(u(rng)));
  for (auto& up : f.uppers)
    for (Real& v : up) v = Real(u(rng));
  return f;
}

/// Seeded (2,3) banded matrix with a positive bidiagonal factorization.
template <class Real = double>
BandedMatrix<Real> random_pbf_matrix(std::uint64_t seed, std::size_t size, Real lo = Real(0.2), Real hi = Real(2)) {
  return banded_from_factors(random_positive_factors<Real>(seed, 2, 3, size, lo, hi));
}

/// Seeded Jacobi matrix with m_n uniform in [-m_spread, m_spread] and
/// ell_n uniform in [ell_lo, ell_hi].
template <class Real = double>
JacobiMatrix<Real> random_jacobi(std::uint64_t seed, std::size_t size, Real m_spread = Real(0.5),
                                 Real ell_lo = Real(0.5), Real ell_hi = Real(1.5)) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> um(-static_cast<double>(m_spread), static_cast<double>(m_spread));
  std::uniform_real_distribution<double> ul(static_cast<double>(ell_lo), static_cast<double>(ell_hi));
  std::vector<Real> m(size);
  std::vector<Real> ell(size - 1);
  for (Real& v : m) v = Real(um(rng));
  for (Real& v : ell) v = Real(ul(rng));
  return JacobiMatrix<Real>(std::move(m), ell);
}

}  // namespace favard
