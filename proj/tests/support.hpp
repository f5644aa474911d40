#pragma once

#include <random>
#include <vector>

#include "chronos/matrices.hpp"
#include "chronos/system.hpp"
#include "chronos/timescale.hpp"

namespace chronos::testing {

inline Mat mat(std::initializer_list<std::initializer_list<double>> rows) {
  Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

/// Integers 0..2, A = [[-1,1],[1,0]], B = [[1,1],[0,1]].
inline LinearSystem integer_two_input() {
  return LinearSystem(TimeScale::integers(0, 2), mat({{-1, 1}, {1, 0}}), mat({{1, 1}, {0, 1}}));
}

inline TimeScale mixed_scale() { return TimeScale::custom({{0, 0}, {1, 2}, {3, 3}}); }

/// {0} u [1,2] u {3}, A = [[-1,0],[1,-1]], b = e1.
inline LinearSystem mixed_scale_system() {
  return LinearSystem(mixed_scale(), mat({{-1, 0}, {1, -1}}), mat({{1}, {0}}));
}

/// {0,1,2,4}, A = [[-1/2,0],[1,-1/2]], b = e1.
inline LinearSystem nonhomogeneous_system() {
  return LinearSystem(TimeScale::points({0, 1, 2, 4}), mat({{-0.5, 0}, {1, -0.5}}), mat({{1}, {0}}));
}

/// Value drawn from the grid lo, lo + step, ..., hi.
inline double grid_value(std::mt19937_64& rng, double lo, double hi, double step = 0.25) {
  const int count = static_cast<int>((hi - lo) / step + 0.5);
  std::uniform_int_distribution<int> pick(0, count);
  return lo + step * pick(rng);
}

inline bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// Sparse nonnegative matrix with entries from {0, 0.5, 1, ..., 2}.
inline Mat sparse_nonneg(std::mt19937_64& rng, Index rows, Index cols, double density) {
  Mat m = Mat::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (coin(rng, density)) m(i, j) = grid_value(rng, 0.5, 2.0, 0.5);
  return m;
}

/// A with A + I / mu_bar >= 0: nonnegative sparse off-diagonal, diagonal in [-1/mu_bar, 1].
inline Mat positive_drift(std::mt19937_64& rng, Index n, double mu_bar, double density) {
  Mat A = sparse_nonneg(rng, n, n, density);
  for (Index i = 0; i < n; ++i) {
    const double lo = mu_bar > 0.0 ? -1.0 / mu_bar : -2.0;
    const int choice = std::uniform_int_distribution<int>(0, 3)(rng);
    A(i, i) = choice == 0 ? lo : choice == 1 ? lo / 2.0 : choice == 2 ? 0.0 : 0.5;
  }
  return A;
}

/// Purely scattered scale with `steps` gaps drawn from {0.5, 1, 2}.
inline TimeScale random_scattered(std::mt19937_64& rng, std::size_t steps) {
  static constexpr double gaps[] = {0.5, 1.0, 2.0};
  std::uniform_int_distribution<int> pick(0, 2);
  std::vector<double> pts{0.0};
  for (std::size_t i = 0; i < steps; ++i) pts.push_back(pts.back() + gaps[pick(rng)]);
  return TimeScale::points(pts);
}

}  // namespace chronos::testing
