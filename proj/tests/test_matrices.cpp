#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "chronos/error.hpp"
#include "chronos/matrices.hpp"
#include "support.hpp"

using namespace chronos;
using chronos::testing::mat;
using chronos::testing::vec;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Mat random_matrix(std::mt19937_64& rng, Index n, double scale) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = d(rng);
  return m * (scale / m.cwiseAbs().rowwise().sum().maxCoeff());
}

}  // namespace

TEST_CASE("expm closed forms") {
  CHECK(expm(Mat::Zero(2, 2), 7.0) == Mat::Identity(2, 2));
  CHECK(expm(mat({{3, 1}, {-2, 5}}), 0.0) == Mat::Identity(2, 2));

  const Mat d = expm(mat({{-1, 0}, {0, -1}}), 2.0);
  CHECK(d(0, 0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(d(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(d(0, 1) == 0.0);

  // -I + N with N nilpotent: e^{-s}(I + N s)
  const Mat e = expm(mat({{-1, 0}, {1, -1}}), 1.0);
  const Mat expected = std::exp(-1.0) * mat({{1, 0}, {1, 1}});
  CHECK(max_abs(e - expected) < 1e-15);

  CHECK_THROWS_AS(expm(Mat::Zero(2, 3)), Error);
}

TEST_CASE("expm agrees with the Eigen oracle across norms") {
  std::mt19937_64 rng(11);
  for (double scale : {1e-3, 0.5, 3.0, 12.0, 40.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Index n = 1 + trial % 6;
      const Mat X = random_matrix(rng, n, scale);
      const Mat oracle = X.exp();
      CHECK(max_abs(expm(X) - oracle) <= 1e-11 * std::max(1.0, max_abs(oracle)));
    }
  }
}

TEST_CASE("expm is templated on the scalar") {
  Eigen::MatrixXf Xf(2, 2);
  Xf << -1.f, 0.f, 1.f, -1.f;
  const Eigen::MatrixXf ef = expm(Xf, 1.0f);
  CHECK(ef(1, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));

  using MatL = MatrixX<long double>;
  MatL Xl(2, 2);
  Xl << -1.0L, 0.0L, 1.0L, -1.0L;
  const MatL el = expm(Xl, 1.0L);
  CHECK(std::abs(el(0, 0) - std::exp(-1.0L)) < 1e-17L);
}

TEST_CASE("expm_integral closed forms") {
  CHECK(max_abs(expm_integral(Mat::Zero(2, 2), 3.0) - 3.0 * Mat::Identity(2, 2)) < 1e-14);
  CHECK(expm_integral(mat({{-1}}), 1.0)(0, 0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));

  const Mat got = expm_integral(mat({{-1, 0}, {1, -1}}), 1.0);
  const double e1 = std::exp(-1.0);
  const Mat expected = mat({{1 - e1, 0}, {1 - 2 * e1, 1 - e1}});
  CHECK(max_abs(got - expected) < 1e-14);

  CHECK(expm_integral(mat({{2, 1}, {0, 1}}), 0.0) == Mat::Zero(2, 2));
  CHECK_THROWS_AS(expm_integral(mat({{1}}), -1.0), Error);
  try {
    expm_integral(mat({{1}}), -1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeHorizon);
  }
  try {
    expm_integral(Mat::Zero(1, 2), 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSquare);
  }
}

TEST_CASE("property: expm semigroup, derivative, and integral identity") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> horizon(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + trial % 5;
    const Mat X = random_matrix(rng, n, 5.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const double s = horizon(rng);
    const double t = horizon(rng);

    const Mat whole = expm(X, s + t);
    CHECK(max_abs(expm(X, s) * expm(X, t) - whole) <= 1e-9 * std::max(1.0, max_abs(whole)));

    const double h = 1e-5;
    const Mat fd = (expm(X, s + h) - expm(X, s - h)) / (2 * h);
    const Mat exact = X * expm(X, s);
    CHECK(max_abs(fd - exact) <= 1e-6 * std::max(1.0, max_abs(exact)));

    const Mat I = Mat::Identity(n, n);
    const Mat lhs = X * expm_integral(X, s);
    CHECK(max_abs(lhs - (expm(X, s) - I)) <= 1e-9 * std::max(1.0, max_abs(expm(X, s))));
  }
}

TEST_CASE("rank") {
  CHECK(chronos::rank(Mat::Identity(3, 3)) == 3);
  CHECK(chronos::rank(mat({{1, 1}, {1, 1}})) == 1);
  CHECK(chronos::rank(Mat::Zero(2, 2)) == 0);
  // [B, AB] for A = [[-1,1],[1,0]], B = [[1,1],[0,1]]
  const Mat A = mat({{-1, 1}, {1, 0}});
  const Mat B = mat({{1, 1}, {0, 1}});
  Mat K(2, 4);
  K << B, A * B;
  CHECK(K == mat({{1, 1, -1, 0}, {0, 1, 1, 1}}));
  CHECK(chronos::rank(K) == 2);
}

TEST_CASE("is_nonneg") {
  CHECK(is_nonneg(mat({{3, 3}, {3, 6}})));
  CHECK_FALSE(is_nonneg(mat({{-1, 0}, {1, 0}})));
  CHECK(is_nonneg(Mat::Zero(3, 2)));
  CHECK(is_nonneg(mat({{-1e-12}})));
  CHECK_FALSE(is_nonneg(mat({{-1e-12}}), 0.0));
}

TEST_CASE("monomial_index") {
  CHECK(monomial_index(vec({0, 5})) == Index{1});
  CHECK_FALSE(monomial_index(vec({1, 1})).has_value());
  CHECK(monomial_index(std::exp(-1.0) * vec({0, 1})) == Index{1});
  CHECK_FALSE(monomial_index(vec({0, 0})).has_value());
  CHECK_FALSE(monomial_index(vec({0, -3})).has_value());
  CHECK(monomial_index(vec({1e-12, 2})) == Index{1});
}

TEST_CASE("is_monomial") {
  CHECK(is_monomial(mat({{1, 0}, {0, std::exp(-2.0)}})));
  CHECK_FALSE(is_monomial(mat({{3, 3}, {3, 6}})));
  CHECK(is_monomial(Mat::Identity(3, 3)));
  CHECK(is_monomial(mat({{0, 2}, {4, 0}})));
  CHECK_FALSE(is_monomial(mat({{1, 2}, {0, 0}})));
  CHECK_FALSE(is_monomial(mat({{1, 0}, {0, 0}})));
  CHECK_THROWS_AS(is_monomial(Mat::Identity(2, 3)), Error);
}

TEST_CASE("has_monomial_submatrix") {
  auto cover = has_monomial_submatrix(mat({{1, 0.5, 0}, {0, 1, 3}}));
  CHECK(cover.complete);
  CHECK(cover.columns[0] == Index{0});
  CHECK(cover.columns[1] == Index{2});

  cover = has_monomial_submatrix(mat({{1, 0.5}, {0, 1}}));
  CHECK_FALSE(cover.complete);
  CHECK(cover.columns[0] == Index{0});
  CHECK_FALSE(cover.columns[1].has_value());

  CHECK(has_monomial_submatrix(Mat::Identity(2, 2)).complete);
}

TEST_CASE("property: a nonnegative square matrix is monomial iff its inverse is nonnegative") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 4;
    Mat M;
    if (trial % 2 == 0) {
      // Random positive diagonal times a random permutation.
      Eigen::PermutationMatrix<Eigen::Dynamic> P(n);
      P.setIdentity();
      std::shuffle(P.indices().data(), P.indices().data() + n, rng);
      Mat D = Mat::Zero(n, n);
      for (Index i = 0; i < n; ++i) D(i, i) = chronos::testing::grid_value(rng, 0.25, 4.0);
      M = P * D;
      REQUIRE(is_monomial(M));
    } else {
      // Invertible nonnegative with at least one column carrying two positive entries.
      do {
        M = chronos::testing::sparse_nonneg(rng, n, n, 0.6);
        M.diagonal().array() += 1.0;
        M(1, 0) += 1.0;
      } while (chronos::rank(M) < n);
      REQUIRE_FALSE(is_monomial(M));
    }
    const Mat inv = M.inverse();
    CHECK(is_monomial(M) == is_nonneg(inv, 1e-12));
  }
}

TEST_CASE("extended matrices") {
  const Mat A = mat({{-5, 2}, {0, -1}});
  const ExtMat real_line = ExtMat::identity_over(2, 0.0) + A;
  CHECK(real_line.is_infinite(0, 0));
  CHECK(real_line.is_infinite(1, 1));
  CHECK(real_line(0, 1) == 2.0);
  CHECK(real_line.is_nonneg());

  const ExtMat integers = ExtMat::identity_over(2, 1.0) + A;
  CHECK(integers.entries() == mat({{-4, 2}, {0, 0}}));
  CHECK_FALSE(integers.is_nonneg());

  const ExtMat q = ExtMat::identity_over(2, std::numeric_limits<double>::infinity()) + A;
  CHECK(q.entries() == A);

  CHECK_THROWS_AS(ExtMat::identity_over(2, 1.0) + Mat::Zero(3, 3), Error);
}
