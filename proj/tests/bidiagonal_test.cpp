#include <gtest/gtest.h>

#include <cmath>

#include "favard/bidiagonal.hpp"
#include "favard/ensemble.hpp"

using favard::DenseMatrix;
using favard::FactorizationStatus;

namespace {

DenseMatrix<> mat2(double a, double b, double c, double d) {
  DenseMatrix<> m(2, 2);
  m << a, b, c, d;
  return m;
}

double reassembly_error(const DenseMatrix<>& m, const favard::BidiagonalFactorization<>& f) {
  return favard::max_abs(DenseMatrix<>(favard::reassemble(f) - m)) / favard::max_abs(m);
}

favard::BandedMatrix<> free_jacobi(std::size_t size) {
  return favard::tridiagonal_banded(std::vector<double>(size, 0.0), std::vector<double>(size, 1.0));
}

}  // namespace

TEST(Neville, TwoByTwoByHand) {
  const auto r = favard::neville_factorize(mat2(2, 1, 1, 2), 1, 1);
  ASSERT_EQ(r.status, FactorizationStatus::ok);
  ASSERT_EQ(r.factors.lowers.size(), 1u);
  ASSERT_EQ(r.factors.uppers.size(), 1u);
  EXPECT_DOUBLE_EQ(r.factors.lowers[0][0], 0.5);
  EXPECT_DOUBLE_EQ(r.factors.delta[0], 2.0);
  EXPECT_DOUBLE_EQ(r.factors.delta[1], 1.5);
  EXPECT_DOUBLE_EQ(r.factors.uppers[0][0], 0.5);
  EXPECT_TRUE(r.factors.positive);
}

TEST(Neville, ZeroPivotIsDegenerate) {
  const auto r = favard::neville_factorize(mat2(1, 1, 1, 1), 1, 1);
  EXPECT_EQ(r.status, FactorizationStatus::degenerate);
  ASSERT_TRUE(r.failure.has_value());
  EXPECT_EQ(r.failure->factor, "pivot");
  EXPECT_EQ(r.failure->index, 1u);
}

TEST(Neville, NegativePivotIsNotPbf) {
  const auto r = favard::neville_factorize(mat2(0.5, 1, 1, 0.5), 1, 1);
  EXPECT_EQ(r.status, FactorizationStatus::not_pbf);
  ASSERT_TRUE(r.failure.has_value());
  EXPECT_EQ(r.failure->factor, "Delta");
  EXPECT_LT(reassembly_error(mat2(0.5, 1, 1, 0.5), r.factors), 1e-15);
}

TEST(Neville, RejectsEntriesOutsideTheBand) {
  DenseMatrix<> m = DenseMatrix<>::Identity(3, 3);
  m(2, 0) = 1.0;
  EXPECT_THROW(favard::neville_factorize(m, 1, 1), std::invalid_argument);
}

TEST(Neville, ReferenceTruncationsArePositive) {
  const auto t1 = favard::reference_t1(30);
  for (std::size_t n = 0; n < 30; ++n) {
    const DenseMatrix<> m = t1.truncate(n);
    const auto r = favard::neville_factorize(m, 2, 3);
    ASSERT_EQ(r.status, FactorizationStatus::ok) << "N = " << n;
    EXPECT_LT(reassembly_error(m, r.factors), 1e-10) << "N = " << n;
    EXPECT_EQ(r.factors.lowers.size(), 3u);
    EXPECT_EQ(r.factors.uppers.size(), 2u);
  }
}

TEST(Neville, TridiagonalFactorsAreRecoveredExactly) {
  // Tridiagonal factorizations are unique, so the constructing factors come back.
  const auto f = favard::random_positive_factors<double>(3, 1, 1, 12);
  const DenseMatrix<> m = favard::reassemble(f);
  const auto r = favard::neville_factorize(m, 1, 1);
  ASSERT_EQ(r.status, FactorizationStatus::ok);
  for (std::size_t i = 0; i < 11; ++i) {
    EXPECT_NEAR(r.factors.lowers[0][i], f.lowers[0][i], 1e-12);
    EXPECT_NEAR(r.factors.uppers[0][i], f.uppers[0][i], 1e-12);
  }
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(r.factors.delta[i], f.delta[i], 1e-12);
}

TEST(Neville, RandomEnsembleRoundTrip) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = favard::random_pbf_matrix<double>(seed, 26);
    for (std::size_t n : {0u, 1u, 2u, 5u, 12u, 25u}) {
      const DenseMatrix<> m = t.truncate(n);
      const auto r = favard::neville_factorize(m, 2, 3);
      ASSERT_EQ(r.status, FactorizationStatus::ok) << "seed " << seed << " N " << n;
      EXPECT_LT(reassembly_error(m, r.factors), 1e-10);
    }
  }
}

TEST(Neville, StructuralZerosLeadEachOuterFactor) {
  const auto r = favard::neville_factorize(favard::reference_t1(10).truncate(9), 2, 3);
  ASSERT_EQ(r.status, FactorizationStatus::ok);
  EXPECT_EQ(r.factors.lower_structural, (std::vector<std::size_t>{2, 1, 0}));
  EXPECT_EQ(r.factors.upper_structural, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(r.factors.lowers[0][0], 0.0);
  EXPECT_EQ(r.factors.lowers[0][1], 0.0);
  EXPECT_GT(r.factors.lowers[0][2], 0.0);
}

TEST(Oscillatory, HandCases) {
  EXPECT_TRUE(favard::is_oscillatory(mat2(2, 1, 1, 2)).oscillatory);
  const auto c = favard::is_oscillatory(mat2(0, 1, 1, 0));
  EXPECT_FALSE(c.oscillatory);
  EXPECT_FALSE(c.reason.empty());
  EXPECT_TRUE(favard::is_oscillatory(mat2(1, 2, 3, 7)).oscillatory);
  EXPECT_FALSE(favard::is_oscillatory(DenseMatrix<>(DenseMatrix<>::Identity(3, 3))).oscillatory);
}

TEST(Oscillatory, PositiveFactorProductsAreOscillatory) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = favard::random_pbf_matrix<double>(seed, 16);
    for (std::size_t n = 0; n < 16; n += 3) EXPECT_TRUE(favard::is_oscillatory(t.truncate(n)).oscillatory);
  }
}

TEST(OscillatoryShift, FreeJacobi) {
  const double s1 = favard::find_oscillatory_shift(free_jacobi(10), 1);
  EXPECT_GT(s1, 1.0);
  EXPECT_LT(s1, 1.0 + 1e-5);

  const double bound = -2.0 * std::cos(6.0 * M_PI / 7.0);
  const double s5 = favard::find_oscillatory_shift(free_jacobi(10), 5);
  EXPECT_GE(s5, bound);
  EXPECT_LT(s5, bound + 1e-5);
}

TEST(OscillatoryShift, AlreadyPositive) {
  EXPECT_EQ(favard::find_oscillatory_shift(favard::reference_t1(12), 10), 0.0);
}

TEST(Darboux, JacobiAnalogue) {
  const auto r = favard::neville_factorize(mat2(2, 1, 1, 2), 1, 1);
  DenseMatrix<> expected = mat2(2.5, 1, 0.75, 1.5);
  EXPECT_LT(favard::max_abs(DenseMatrix<>(favard::darboux_transform(r.factors, 1) - expected)), 1e-15);
  const auto p = favard::dense_charpoly(favard::darboux_transform(r.factors, 1));
  EXPECT_LT(favard::relative_coeff_distance(p, favard::Poly<>{3.0, -4.0, 1.0}), 1e-15);
}

TEST(Darboux, IdentityFactorsGiveIdentity) {
  auto f = favard::constant_factors<double>(2, 3, 5, 0.0);
  f.delta.assign(5, 1.0);
  for (int v : {-2, -1, 1, 2, 3})
    EXPECT_EQ(favard::darboux_transform(f, v), DenseMatrix<>(DenseMatrix<>::Identity(5, 5)));
}

TEST(Darboux, VariantsAreIsospectral) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto t = favard::random_pbf_matrix<double>(seed, 21);
    for (std::size_t n : {3u, 10u, 20u}) {
      const DenseMatrix<> m = t.truncate(n);
      const auto r = favard::neville_factorize(m, 2, 3);
      ASSERT_TRUE(r.positive());
      const auto base = favard::dense_charpoly(m);
      for (int v : {-2, -1, 1, 2, 3})
        EXPECT_LT(favard::relative_coeff_distance(favard::dense_charpoly(favard::darboux_transform(r.factors, v)), base),
                  1e-9);
    }
  }
}

TEST(Darboux, RejectsUnknownVariant) {
  const auto f = favard::constant_factors<double>(2, 3, 4);
  EXPECT_THROW(favard::darboux_transform(f, 0), std::invalid_argument);
  EXPECT_THROW(favard::darboux_transform(f, 4), std::invalid_argument);
  EXPECT_THROW(favard::darboux_transform(f, -3), std::invalid_argument);
}
