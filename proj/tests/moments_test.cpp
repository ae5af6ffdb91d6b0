#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "favard/ensemble.hpp"
#include "favard/jacobi.hpp"
#include "favard/moments.hpp"

using favard::DenseMatrix;
using favard::InitialConditions;
using Complex = std::complex<double>;

namespace {

const favard::BandedMatrix<>& t1() {
  static const auto t = favard::reference_t1(120);
  return t;
}

const InitialConditions<> kSkewed{0.3, -0.2, 0.5, 0.7};

DenseMatrix<double> dense_power(const DenseMatrix<double>& m, std::size_t n) {
  DenseMatrix<double> out = DenseMatrix<double>::Identity(m.rows(), m.cols());
  for (std::size_t i = 0; i < n; ++i) out = out * m;
  return out;
}

double max_gap(const DenseMatrix<Complex>& a, const DenseMatrix<Complex>& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, a.cwiseAbs().maxCoeff());
}

}  // namespace

TEST(Moments, HandValues) {
  DenseMatrix<double> psi0(2, 3), psi1(2, 3);
  psi0 << 1, 0, 0, 0, 1, 0;
  psi1 << 1, 2, 1, 3, 7, 5;
  EXPECT_EQ(favard::moments_from_T(t1(), 0), psi0);
  EXPECT_EQ(favard::moments_from_T(t1(), 1), psi1);
}

TEST(Moments, DensePowersOfLargeTruncation) {
  // Integer entries: the dense powers are exact in double, and any
  // truncation larger than 2n + 3 has the same top-left block.
  for (std::size_t n = 0; n <= 8; ++n) {
    const DenseMatrix<double> big = dense_power(t1().truncate(2 * n + 9), n);
    const DenseMatrix<double> want = big.topLeftCorner(2, 3);
    EXPECT_EQ(favard::moments_from_T(t1(), n), want) << "n = " << n;
  }
}

TEST(Moments, InitialConditionsEnterAsInverses) {
  const auto t = favard::random_pbf_matrix(3, 40);
  const DenseMatrix<double> nu = kSkewed.nu();
  const DenseMatrix<double> xi = kSkewed.xi();
  for (std::size_t n : {0, 1, 4, 7}) {
    const DenseMatrix<double> block = dense_power(t.truncate(30), n).topLeftCorner(2, 3);
    const DenseMatrix<double> want = xi.inverse() * block * nu.inverse().transpose();
    const DenseMatrix<double> got = favard::moments_from_T(t, n, kSkewed);
    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, want.cwiseAbs().maxCoeff())) << "n = " << n;
  }
}

TEST(Moments, TooSmallMatrix) {
  EXPECT_THROW(favard::moments_from_T(favard::reference_t1(10), 4), std::out_of_range);
}

TEST(MomentMatrix, InterleaveAndHankelStructure) {
  const auto m = favard::moment_matrix(t1(), InitialConditions<>{}, 12);
  EXPECT_EQ(m.entries(0, 0), 1.0);
  EXPECT_EQ(m.entries(1, 2), 0.0);
  EXPECT_EQ(m.entries(0, 3), 1.0);
  // Shifting two rows down or three columns right raises j + k by one.
  for (Eigen::Index r = 0; r + 2 < 12; ++r)
    for (Eigen::Index c = 0; c + 3 < 12; ++c) EXPECT_EQ(m.entries(r + 2, c), m.entries(r, c + 3));
}

TEST(GaussBorel, OneByOne) {
  const auto g = favard::gauss_borel(t1(), InitialConditions<>{}, 1);
  EXPECT_DOUBLE_EQ(g.bmat(0, 0) * 1.0 * g.amat(0, 0), 1.0);
}

TEST(GaussBorel, ReferenceAgainstDiscreteBiorthogonality) {
  const auto g = favard::gauss_borel(t1(), InitialConditions<>{}, 12);
  EXPECT_LT(g.residual, 1e-8);
  EXPECT_LT(g.recursion_mismatch, 1e-12);
  // Oracle: read rows of B and columns of A as polynomial vectors and
  // integrate against the discrete measure of a larger truncation, whose
  // quadrature is exact at these degrees.
  const auto m = favard::truncation_measure(t1(), 20);
  const auto& lam = m.spectrum.lambdas;
  DenseMatrix<double> gram = DenseMatrix<double>::Zero(12, 12);
  for (std::size_t k = 0; k < lam.size(); ++k) {
    const auto ik = static_cast<Eigen::Index>(k);
    for (Eigen::Index r = 0; r < 12; ++r)
      for (Eigen::Index c = 0; c < 12; ++c) {
        double bsum = 0.0, asum = 0.0;
        for (Eigen::Index col = 0; col < 12; ++col)
          bsum += g.bmat(r, col) * std::pow(lam[k], static_cast<double>(col / 2)) * m.christoffel.rho(ik, col % 2);
        for (Eigen::Index row = 0; row < 12; ++row)
          asum += g.amat(row, c) * std::pow(lam[k], static_cast<double>(row / 3)) * m.christoffel.mu(ik, row % 3);
        gram(r, c) += bsum * asum;
      }
  }
  EXPECT_LT((gram - DenseMatrix<double>::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(GaussBorel, StaircaseShape) {
  const auto g = favard::gauss_borel(t1(), kSkewed, 15);
  for (Eigen::Index r = 0; r < 15; ++r)
    for (Eigen::Index c = r + 1; c < 15; ++c) {
      EXPECT_EQ(g.bmat(r, c), 0.0);
      EXPECT_EQ(g.amat(c, r), 0.0);
    }
  // Leading coefficients: B^1_2 = x / T(0,2), A^1_3 = x / T(3,0).
  EXPECT_DOUBLE_EQ(g.bmat(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(g.amat(3, 3), 1.0);
}

TEST(GaussBorel, EnsembleAtThirty) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = favard::gauss_borel(favard::random_pbf_matrix(seed, 80), InitialConditions<>{}, 30);
    EXPECT_LT(g.residual, 1e-7) << "seed " << seed;
    EXPECT_LT(g.recursion_residual, 1e-7) << "seed " << seed;
  }
}

TEST(GaussBorel, VanishingExtremeEntryIsIrregular) {
  auto t = favard::reference_t1(40);
  t.set(0, 2, 0.0);
  EXPECT_THROW(favard::gauss_borel(t, InitialConditions<>{}, 3), favard::NumericalError);
  EXPECT_NO_THROW(favard::gauss_borel(t, InitialConditions<>{}, 2));
}

TEST(SecondKind, FirstOrderHandValue) {
  // adj(-T^[1]) for T^[1] = [[1,2],[3,7]] is [[-7,2],[3,-1]], padded to 2 x 3.
  const auto sk = favard::second_kind_matrix(t1(), 1, InitialConditions<>{}, Complex(0.0));
  DenseMatrix<Complex> want(2, 3);
  want << -7.0, 2.0, 0.0, 3.0, -1.0, 0.0;
  EXPECT_LT(max_gap(sk.value, want), 1e-14);
  // Two-node interpolation form.
  const auto m = favard::truncation_measure(t1(), 1);
  DenseMatrix<Complex> two = DenseMatrix<Complex>::Zero(2, 3);
  for (Eigen::Index k = 0; k < 2; ++k) {
    const double other = m.spectrum.lambdas[static_cast<std::size_t>(1 - k)];
    two += (m.christoffel.rho.row(k).transpose() * m.christoffel.mu.row(k) * -other).cast<Complex>();
  }
  EXPECT_LT(max_gap(sk.value, two), 1e-12);
}

TEST(SecondKind, OrderZeroIsTheOneByOneAdjugate) {
  const auto sk = favard::second_kind_matrix(t1(), 0, InitialConditions<>{}, Complex(2.5, 1.0));
  DenseMatrix<Complex> want = DenseMatrix<Complex>::Zero(2, 3);
  want(0, 0) = 1.0;
  EXPECT_LT(max_gap(sk.value, want), 1e-15);
}

TEST(SecondKind, DegreeAtMostN) {
  // N + 2 samples of a degree-N polynomial have vanishing (N+1)-st difference.
  const std::size_t n = 5;
  const auto m = favard::truncation_measure(t1(), n, kSkewed);
  std::vector<DenseMatrix<Complex>> vals;
  for (std::size_t i = 0; i <= n + 1; ++i) vals.push_back(favard::second_kind_matrix(m, Complex(double(i))).value);
  for (std::size_t level = 0; level <= n; ++level)
    for (std::size_t i = 0; i + 1 < vals.size() - level; ++i) vals[i] = vals[i + 1] - vals[i];
  double scale = 0.0;
  for (std::size_t i = 0; i <= n + 1; ++i)
    scale = std::max(scale, favard::second_kind_matrix(m, Complex(double(i))).value.cwiseAbs().maxCoeff());
  EXPECT_LT(vals[0].cwiseAbs().maxCoeff(), 1e-9 * scale * std::pow(2.0, double(n + 1)));
}

TEST(Weyl, OrderZeroSingleNode) {
  const auto w = favard::weyl_matrix(t1(), 0, InitialConditions<>{}, Complex(5.0, 0.5));
  DenseMatrix<Complex> want = DenseMatrix<Complex>::Zero(2, 3);
  want(0, 0) = 1.0 / (Complex(5.0, 0.5) - 1.0);
  EXPECT_LT(max_gap(w.s, want), 1e-15);
}

TEST(Weyl, TotalMassAtInfinity) {
  const Complex z(1e6, 0.0);
  for (const auto& ic : {InitialConditions<>{}, kSkewed}) {
    const auto w = favard::weyl_matrix(t1(), 6, ic, z);
    const DenseMatrix<double> want = ic.xi().inverse() * DenseMatrix<double>::Identity(2, 3) * ic.nu().inverse().transpose();
    EXPECT_LT((w.s * z - want.cast<Complex>()).cwiseAbs().maxCoeff(), 1e-4);
    // (Psi_0)_{2,3} = 0 for identity conditions: that entry decays faster.
    if (ic.is_identity()) {
      EXPECT_LT(std::abs(w.s(1, 2)) * std::abs(z), 1e-4);
    }
  }
}

TEST(Weyl, ThreeRoutesAgreeOnEnsemble) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto m = favard::truncation_measure(favard::random_pbf_matrix(seed, 40), 10, kSkewed);
    for (const Complex z : {Complex(-1.0, 0.0), Complex(0.5, 2.0), Complex(40.0, -3.0)}) {
      const auto w = favard::weyl_matrix(m, z);
      EXPECT_LT(w.residual, 1e-7);
    }
  }
}

TEST(Weyl, PoleProximity) {
  const auto m = favard::truncation_measure(t1(), 4);
  EXPECT_THROW(favard::weyl_matrix(m, Complex(m.spectrum.lambdas[2])), favard::PoleProximity);
}

TEST(WeylProbe, ReferenceConvergesMonotonically) {
  const auto probe = favard::weyl_convergence_probe(t1(), InitialConditions<>{}, Complex(30.0), {10, 20, 30, 40, 50});
  ASSERT_EQ(probe.differences.size(), 4u);
  EXPECT_TRUE(probe.monotone);
  EXPECT_LT(probe.differences.back(), 1e-9);
}

TEST(WeylProbe, ChebyshevClosedForm) {
  const auto j = favard::JacobiMatrix<>::constant(60, 0.0, 1.0).to_banded();
  const DenseMatrix<double> one = DenseMatrix<double>::Identity(1, 1);
  const auto probe = favard::weyl_convergence_probe(j, one, one, Complex(10.0), {10, 20, 40});
  EXPECT_NEAR(probe.values.back()(0, 0).real(), (10.0 - std::sqrt(96.0)) / 2.0, 1e-10);
  EXPECT_TRUE(probe.monotone);
}

TEST(WeylProbe, SingleOrderAndSpectralDisk) {
  const auto probe = favard::weyl_convergence_probe(t1(), InitialConditions<>{}, Complex(30.0), {12});
  EXPECT_TRUE(probe.differences.empty());
  EXPECT_THROW(favard::weyl_convergence_probe(t1(), InitialConditions<>{}, Complex(20.0), {10, 20}), favard::PoleProximity);
}

TEST(Contour, ResiduesAgainstTrapezoidRule) {
  const auto big = favard::truncation_measure(t1(), 40);
  const double radius = 35.0;
  const int samples = 400;
  const DenseMatrix<double> trunc = t1().truncate(40);
  const DenseMatrix<double> nu = DenseMatrix<double>::Identity(3, 3);
  const DenseMatrix<double> xi = DenseMatrix<double>::Identity(2, 2);
  auto trapezoid = [&](std::size_t n, std::size_t m) {
    Complex acc(0.0);
    for (int s = 0; s < samples; ++s) {
      const Complex z = std::polar(radius, 2.0 * std::numbers::pi * s / samples);
      const auto sv = favard::detail::resolvent_block(trunc, nu, xi, z);
      const auto b = favard::type_two_family<Complex>(t1(), xi, n, z);
      const auto a = favard::type_one_family<Complex>(t1(), nu, m, z);
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 3; ++c) acc += b[r][n] * sv[r * 3 + c] * a[c][m] * z;
    }
    return acc / double(samples);
  };
  for (std::size_t n : {0, 1, 3}) {
    for (std::size_t m : {0, 1, 3}) {
      const auto c = favard::contour_biorthogonality_check(t1(), big, n, m, radius);
      EXPECT_TRUE(c.encloses_all);
      EXPECT_LT(c.error, 1e-7);
      EXPECT_LT(std::abs(trapezoid(n, m) - c.value), 1e-7) << n << "," << m;
    }
  }
}

TEST(Contour, EmptyInside) {
  const auto big = favard::truncation_measure(t1(), 12);
  const auto c = favard::contour_biorthogonality_check(t1(), big, 0, 0, 1e-9);
  EXPECT_EQ(c.enclosed, 0u);
  EXPECT_EQ(c.value, Complex(0.0));
  EXPECT_FALSE(c.encloses_all);
  EXPECT_THROW(favard::contour_biorthogonality_check(t1(), big, 0, 0, -1.0), std::invalid_argument);
  EXPECT_THROW(favard::contour_biorthogonality_check(t1(), big, 13, 0, 40.0), std::invalid_argument);
}

TEST(Quadrature, ReferenceDegreesAtFour) {
  EXPECT_EQ(favard::degree_of_precision(4, 1, 1), 4);
  EXPECT_EQ(favard::degree_of_precision(4, 3, 2), 2);
  const auto table = favard::quadrature_table(t1(), 4);
  ASSERT_EQ(table.size(), 6u);
  for (const auto& c : table) {
    EXPECT_TRUE(c.exact) << c.b << "," << c.a;
    EXPECT_EQ(c.exact_degree, c.degree);
    EXPECT_TRUE(c.optimal);
  }
  EXPECT_EQ(table[0].degree, 4);
  EXPECT_EQ(table[5].degree, 2);
}

TEST(Quadrature, ZerothMomentAlwaysExactWhereDefined) {
  const auto t = favard::random_pbf_matrix(11, 60);
  for (std::size_t n = 1; n <= 8; ++n)
    for (const auto& c : favard::quadrature_table(t, n, kSkewed)) {
      EXPECT_LT(c.residuals[0], 1e-8);
      EXPECT_TRUE(c.exact);
    }
}

TEST(Quadrature, NeverExactPastTheDegree) {
  // The rule fails at d + 1 by far more than the exactness noise; the
  // relative size of that failure falls with N.
  const auto f = favard::random_positive_factors(5, 2, 3, 60);
  const auto t = favard::banded_from_factors(f);
  const auto ic = favard::pbf_initial_conditions(f);
  double early = 0.0, late = 1.0;
  for (std::size_t n = 1; n <= 10; ++n)
    for (const auto& c : favard::quadrature_table(t, n, ic)) {
      const double r = c.residuals[static_cast<std::size_t>(c.degree + 1)];
      EXPECT_GT(r, 1e-30);
      if (n == 1) early = std::max(early, r);
      if (n == 10) late = std::min(late, r);
    }
  EXPECT_GT(early, 1e-4);
  EXPECT_LT(late, 1e-4);
}
