#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"

using namespace qcmod;
using qcmod::testing::random_matrix;
using qcmod::testing::sweep_directions;

TEST(Vector, ArithmeticAndNorm) {
  const Vector<3> a{1.0, 2.0, 2.0};
  const Vector<3> b{0.0, -1.0, 4.0};
  EXPECT_DOUBLE_EQ(norm(a), 3.0);
  EXPECT_DOUBLE_EQ(dot(a, b), 6.0);
  EXPECT_EQ(a + b, (Vector<3>{1.0, 1.0, 6.0}));
  EXPECT_EQ(2.0 * a - b, (Vector<3>{2.0, 5.0, 0.0}));
  EXPECT_DOUBLE_EQ(distance(a, a), 0.0);
}

TEST(Vector, NormDoesNotOverflow) {
  const Vector<2> v{3e200, 4e200};
  EXPECT_DOUBLE_EQ(norm(v), 5e200);
  const Vector<3> w{3e-200, 4e-200, 0.0};
  EXPECT_DOUBLE_EQ(norm(w), 5e-200);
}

TEST(Vector, DirectionRejectsCoincidentPoints) {
  const Point<2> p{1.0, 1.0};
  EXPECT_THROW(direction(p, p), InvalidInput);
  const auto d = direction(Point<2>{}, Point<2>{0.0, 2.0});
  EXPECT_DOUBLE_EQ(d[1], 1.0);
}

TEST(Matrix, ProductsAndTranspose) {
  const Matrix<2> a{1.0, 2.0, 3.0, 4.0};
  const Matrix<2> b{0.0, 1.0, -1.0, 0.0};
  const Matrix<2> ab = a * b;
  EXPECT_EQ(ab, (Matrix<2>{-2.0, 1.0, -4.0, 3.0}));
  EXPECT_EQ(a.transposed(), (Matrix<2>{1.0, 3.0, 2.0, 4.0}));
  const Vector<2> v = a * Vector<2>{1.0, -1.0};
  EXPECT_EQ(v, (Vector<2>{-1.0, -1.0}));
  EXPECT_EQ(transpose_apply(a, Vector<2>{1.0, 0.0}), (Vector<2>{1.0, 2.0}));
}

TEST(Determinant, ClosedFormsAgreeWithLu) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto a2 = random_matrix<2>(rng, 3.0);
    EXPECT_NEAR(determinant(a2), detail::lu_determinant(a2), 1e-12);
    const auto a3 = random_matrix<3>(rng, 3.0);
    EXPECT_NEAR(determinant(a3), detail::lu_determinant(a3), 1e-11);
  }
  const Matrix<4> d4 = Matrix<4>::diagonal(Vector<4>{1.0, -2.0, 3.0, 0.5});
  EXPECT_NEAR(determinant(d4), -3.0, 1e-14);
}

template <std::size_t N>
void check_singular_values_against_sweep(std::uint64_t seed, std::size_t steps, double tol) {
  std::mt19937_64 rng(seed);
  const auto dirs = sweep_directions<N>(steps);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_matrix<N>(rng, 2.0);
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (const auto& h : dirs) {
      const double v = norm(a * h);
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    const auto s = singular_values(a);
    EXPECT_NEAR(op_norm(a), hi, tol * std::max(1.0, hi)) << a;
    EXPECT_NEAR(min_singular(a), lo, tol * std::max(1.0, hi)) << a;
    double prod = 1.0;
    for (std::size_t i = 0; i < N; ++i) {
      prod *= s[i];
      if (i > 0) EXPECT_GE(s[i - 1], s[i]);
    }
    EXPECT_NEAR(prod, std::abs(determinant(a)), 1e-10 * std::max(1.0, prod));
  }
}

TEST(SingularValues, PlanarMatchBruteForceSweep) { check_singular_values_against_sweep<2>(3, 200000, 1e-8); }

TEST(SingularValues, SpatialMatchBruteForceSweep) { check_singular_values_against_sweep<3>(4, 600, 2e-4); }

TEST(SingularValues, GeneralDimensionUsesJacobi) {
  // Orthogonal conjugation of a known diagonal keeps the singular values.
  std::mt19937_64 rng(5);
  Matrix<4> q = Matrix<4>::identity();
  for (int k = 0; k < 6; ++k) {
    const std::size_t i = rng() % 4, j = (i + 1 + rng() % 3) % 4;
    const double t = qcmod::testing::uniform(rng, 0.0, 3.0);
    Matrix<4> g = Matrix<4>::identity();
    g(i, i) = g(j, j) = std::cos(t);
    g(i, j) = -std::sin(t);
    g(j, i) = std::sin(t);
    q = g * q;
  }
  const Matrix<4> a = q * Matrix<4>::diagonal(Vector<4>{4.0, -3.0, 2.0, 0.5}) * q.transposed();
  const auto s = singular_values(a);
  EXPECT_NEAR(s[0], 4.0, 1e-10);
  EXPECT_NEAR(s[1], 3.0, 1e-10);
  EXPECT_NEAR(s[2], 2.0, 1e-10);
  EXPECT_NEAR(s[3], 0.5, 1e-10);
}

TEST(SingularValues, RepeatedValuesOfConformalMatrix) {
  const Matrix<2> a{3.0, -4.0, 4.0, 3.0};
  const auto s = singular_values(a);
  EXPECT_NEAR(s[0], 5.0, 1e-14);
  EXPECT_NEAR(s[1], 5.0, 1e-14);
  const Matrix<3> b = 2.0 * Matrix<3>::identity();
  const auto t = singular_values(b);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(t[i], 2.0, 1e-14);
}

template <std::size_t N>
void check_inverse(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 200; ++i) {
    const auto a = qcmod::testing::random_nondegenerate<N>(rng);
    const auto b = invert(a);
    const auto e = a * b - Matrix<N>::identity();
    for (double v : e.a) EXPECT_NEAR(v, 0.0, 1e-11);
    const auto u = qcmod::testing::random_unit<N>(rng);
    const auto w = solve_transpose(a, u);
    const auto back = transpose_apply(a, w);
    for (std::size_t k = 0; k < N; ++k) EXPECT_NEAR(back[k], u[k], 1e-11);
  }
}

TEST(Invert, RoundTripPlanar) { check_inverse<2>(21); }
TEST(Invert, RoundTripSpatial) { check_inverse<3>(22); }
TEST(Invert, RoundTripGeneral) { check_inverse<4>(23); }

TEST(Invert, SingularMatrixReportsDeterminant) {
  const Matrix<2> a{1.0, 2.0, 2.0, 4.0};
  EXPECT_TRUE(is_singular(a));
  try {
    invert(a);
    FAIL() << "expected SingularMatrix";
  } catch (const SingularMatrix& e) {
    EXPECT_LE(e.abs_det(), 1e-12);
  }
  EXPECT_THROW(solve_transpose(a, Vector<2>{1.0, 0.0}), SingularMatrix);
  const Matrix<3> z{};
  EXPECT_THROW(invert(z), SingularMatrix);
}

TEST(Invert, TinyButWellConditionedIsNotSingular) {
  const Matrix<2> a = 1e-8 * Matrix<2>::identity();
  EXPECT_FALSE(is_singular(a));
  EXPECT_NEAR(invert(a)(0, 0), 1e8, 1e-4);
}

TEST(Matrix, NonFiniteEntriesRejected) {
  Matrix<2> a = Matrix<2>::identity();
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(is_finite(a));
  EXPECT_THROW(singular_values(a), InvalidInput);
  EXPECT_THROW(invert(a), InvalidInput);
}
