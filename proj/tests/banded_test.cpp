#include <gtest/gtest.h>

#include "favard/banded.hpp"
#include "favard/bidiagonal.hpp"

using favard::BandedMatrix;
using favard::DenseMatrix;

namespace {

BandedMatrix<> free_jacobi(std::size_t size) {
  return favard::tridiagonal_banded(std::vector<double>(size, 0.0), std::vector<double>(size, 1.0));
}

}  // namespace

TEST(Banded, TruncateReadsLeadingBlock) {
  DenseMatrix<> expected(2, 2);
  expected << 0, 1, 1, 0;
  EXPECT_EQ(free_jacobi(8).truncate(1), expected);

  EXPECT_EQ(favard::reference_t1(10).truncate(0)(0, 0), 1.0);
}

TEST(Banded, ReferenceMatrixRows) {
  const auto t1 = favard::reference_t1(12);
  const DenseMatrix<> m = t1.truncate(4);
  const std::vector<double> row0{1, 2, 1, 0, 0};
  const std::vector<double> row1{3, 7, 5, 1, 0};
  for (int j = 0; j < 5; ++j) {
    EXPECT_EQ(m(0, j), row0[j]);
    EXPECT_EQ(m(1, j), row1[j]);
  }
  DenseMatrix<> top(2, 2);
  top << 1, 2, 3, 7;
  EXPECT_EQ(t1.truncate(1), top);
  EXPECT_EQ(t1.upper_bandwidth(), 2u);
  EXPECT_EQ(t1.lower_bandwidth(), 3u);
}

TEST(Banded, TruncateOutOfRangeThrows) {
  EXPECT_THROW(free_jacobi(4).truncate(4), std::out_of_range);
  EXPECT_THROW(free_jacobi(4)(0, 4), std::out_of_range);
}

TEST(Banded, ShiftTouchesOnlyTheDiagonal) {
  DenseMatrix<> expected(2, 2);
  expected << 2, 1, 1, 2;
  EXPECT_EQ(favard::shift(free_jacobi(6), 2.0).truncate(1), expected);
  EXPECT_EQ(favard::shift(free_jacobi(6), 0.0), free_jacobi(6));
  EXPECT_EQ(favard::shift(favard::reference_t1(6), -1.0)(0, 0), 0.0);
}

TEST(Banded, ShiftCommutesWithTruncation) {
  const auto t1 = favard::reference_t1(20);
  for (std::size_t n : {0u, 3u, 10u, 19u}) {
    const DenseMatrix<> a = t1.shifted(0.375).truncate(n);
    const DenseMatrix<> b = t1.truncate(n) + 0.375 * DenseMatrix<>::Identity(n + 1, n + 1);
    EXPECT_EQ(a, b);
  }
}

TEST(Banded, FromBandsValidatesLengths) {
  EXPECT_THROW(BandedMatrix<>::from_bands(1, 1, 3, {{1, 1}, {0, 0, 0}, {1}}), std::invalid_argument);
  const auto t = BandedMatrix<>::from_bands(1, 1, 3, {{4, 5}, {1, 2, 3}, {6, 7}});
  EXPECT_EQ(t(2, 1), 5.0);
  EXPECT_EQ(t(1, 2), 7.0);
  EXPECT_EQ(t(2, 0), 0.0);
}

TEST(Banded, Norms) {
  DenseMatrix<> m(2, 2);
  m << 1, -2, 3, 4;
  EXPECT_EQ(favard::norm_one(m), 6.0);
  EXPECT_EQ(favard::norm_inf(m), 7.0);
}
