#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "ska/matrix.hpp"

using ska::Matrix;

TEST(Matrix, RejectsZeroDimensionsAndBadData) {
  EXPECT_THROW(Matrix(0, 3), std::invalid_argument);
  EXPECT_THROW(Matrix(2, 0), std::invalid_argument);
  EXPECT_THROW(Matrix(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);
  EXPECT_THROW(Matrix(1, 1, {std::numeric_limits<double>::quiet_NaN()}), ska::NonFiniteError);
  EXPECT_THROW((Matrix{{1.0, 2.0}, {3.0}}), std::invalid_argument);
}

TEST(Matrix, IdentityTimesMatrixIsExact) {
  const Matrix m{{0.1, -2.5}, {3.75, 1e-300}};
  EXPECT_EQ(ska::matmul(Matrix::identity(2), m), m);
}

TEST(Matrix, SmallProduct) {
  const Matrix c = ska::matmul(Matrix{{1, 2}, {3, 4}}, Matrix{{1}, {1}});
  EXPECT_EQ(c, (Matrix{{3}, {7}}));
}

TEST(Matrix, MatmulMatchesTripleLoopExactly) {
  const Matrix a = oracle::random_matrix(5, 7, 1);
  const Matrix b = oracle::random_matrix(7, 3, 2);
  EXPECT_EQ(ska::matmul(a, b), oracle::naive_matmul(a, b));
}

TEST(Matrix, MatmulShapeErrorNamesBothShapes) {
  try {
    ska::matmul(Matrix(2, 3), Matrix(4, 5));
    FAIL() << "expected ShapeError";
  } catch (const ska::ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2x3"), std::string::npos);
    EXPECT_NE(msg.find("4x5"), std::string::npos);
    EXPECT_EQ(e.lhs(), (ska::Shape{2, 3}));
    EXPECT_EQ(e.rhs(), (ska::Shape{4, 5}));
  }
}

TEST(Matrix, OuterMeanExamples) {
  EXPECT_EQ(ska::outer_mean(Matrix{{2}}, Matrix{{3}}), Matrix{{6}});
  const Matrix i2 = Matrix::identity(2);
  EXPECT_EQ(ska::outer_mean(i2, i2), (Matrix{{0.5, 0}, {0, 0.5}}));
  EXPECT_THROW(ska::outer_mean(Matrix(3, 2), Matrix(4, 2)), ska::ShapeError);
}

TEST(Matrix, OuterMeanMatchesPerSampleLoop) {
  const Matrix a = oracle::random_matrix(8, 3, 3);
  const Matrix b = oracle::random_matrix(8, 4, 4);
  EXPECT_LT(oracle::max_abs_diff(ska::outer_mean(a, b), oracle::naive_outer_mean(a, b)), 1e-15);
}

TEST(Matrix, OuterMeanEqualsScaledTransposeProduct) {
  const Matrix a = oracle::random_matrix(33, 9, 5);
  const Matrix b = oracle::random_matrix(33, 13, 6);
  const Matrix ref = ska::scale(ska::matmul(ska::transpose(a), b), 1.0 / 33.0);
  const Matrix got = ska::outer_mean(a, b);
  for (std::size_t i = 0; i < ref.size(); ++i)
    EXPECT_NEAR(got.flat()[i], ref.flat()[i], 1e-14 * std::max(1.0, std::abs(ref.flat()[i])));
}

TEST(Matrix, Transpose) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(ska::transpose(m), (Matrix{{1, 4}, {2, 5}, {3, 6}}));
  EXPECT_EQ(ska::transpose(ska::transpose(m)), m);
}

TEST(Matrix, FrobeniusNorm) {
  EXPECT_EQ(ska::frobenius_norm(Matrix(3, 3)), 0.0);
  EXPECT_EQ(ska::frobenius_norm(Matrix{{3, 4}}), 5.0);
  const Matrix m = oracle::random_matrix(10, 10, 7);
  long double s = 0;
  for (double v : m.flat()) s += static_cast<long double>(v) * v;
  const double ref = static_cast<double>(std::sqrt(s));
  EXPECT_NEAR(ska::frobenius_norm(m), ref, 1e-12 * ref);
  EXPECT_NEAR(ska::frobenius_norm(ska::scale(m, -2.5)), 2.5 * ref, 1e-12 * 2.5 * ref);
}

TEST(Matrix, CosineExamples) {
  const Matrix b{{1, -2}, {0.5, 3}};
  EXPECT_NEAR(ska::cosine_flat(ska::scale(b, 3.0), b), 1.0, 1e-15);
  EXPECT_NEAR(ska::cosine_flat(ska::scale(b, -1.0), b), -1.0, 1e-15);
  EXPECT_THROW(ska::cosine_flat(Matrix(2, 2), b), ska::UndefinedCosine);
  EXPECT_THROW(ska::cosine_flat(Matrix(2, 3), b), ska::ShapeError);
}

TEST(Matrix, CosineMatchesLoopOracleAndIsScaleInvariant) {
  const Matrix a = oracle::random_matrix(6, 5, 8);
  const Matrix b = oracle::random_matrix(6, 5, 9);
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a.flat()[i]) * b.flat()[i];
    na += static_cast<long double>(a.flat()[i]) * a.flat()[i];
    nb += static_cast<long double>(b.flat()[i]) * b.flat()[i];
  }
  const double ref = static_cast<double>(dot / std::sqrt(na * nb));
  EXPECT_NEAR(ska::cosine_flat(a, b), ref, 1e-12);
  EXPECT_NEAR(ska::cosine_flat(ska::scale(a, 7.0), ska::scale(b, 0.01)), ref, 1e-12);
}

TEST(Matrix, ElementwiseOps) {
  const Matrix m = oracle::random_matrix(4, 5, 10);
  EXPECT_EQ(ska::scale(m, 0.0), Matrix(4, 5));
  EXPECT_EQ(ska::sub(m, m), Matrix(4, 5));
  const Matrix a{{0.5, 0.25, -1.75}};
  const Matrix b{{0.125, 2.0, 0.0625}};
  EXPECT_EQ(ska::add(ska::sub(a, b), b), a);
  EXPECT_EQ(ska::hadamard(a, b), (Matrix{{0.0625, 0.5, -0.109375}}));
  EXPECT_EQ(ska::sub_scaled(a, b, 2.0), (Matrix{{0.25, -3.75, -1.875}}));
  EXPECT_EQ(ska::elementwise(a, [](double v) { return v * 4; }), (Matrix{{2, 1, -7}}));
  EXPECT_THROW(ska::add(a, Matrix(1, 2)), ska::ShapeError);
}

TEST(Matrix, OperationsRejectNonFiniteResults) {
  const Matrix big{{1e308}};
  EXPECT_THROW(ska::add(big, big), ska::NonFiniteError);
  EXPECT_THROW(ska::scale(big, 10.0), ska::NonFiniteError);
}
