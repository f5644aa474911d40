#pragma once

#include <string>
#include <vector>

#include "chronos/error.hpp"
#include "chronos/matrices.hpp"
#include "chronos/timescale.hpp"

namespace chronos {

/// One factor of e_A(t, t0): I + mu A for a scattered point, e^{A delta} for a dense run.
template <typename Scalar>
struct ExpFactor {
  WindowPiece piece;
  MatrixX<Scalar> value;
};

/// e_A(to, from) together with its time-ordered factorization.
template <typename Scalar>
struct ExpPath {
  double from = 0.0;
  double to = 0.0;
  std::vector<ExpFactor<Scalar>> factors;  // earliest first
  MatrixX<Scalar> value;
};

/// Transition matrix across a single piece of a window partition.
template <typename Derived>
MatrixX<typename Derived::Scalar> piece_factor(const Eigen::MatrixBase<Derived>& A, const WindowPiece& piece) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(A, "piece_factor");
  if (piece.is_atom()) {
    MatrixX<Scalar> f = Scalar(piece.measure()) * A;
    f.diagonal().array() += Scalar(1);
    return f;
  }
  return expm(A, Scalar(piece.measure()));
}

/// Builds e_A(t, t0) by multiplying the partition factors of [t0, t)_T, later ones on the left.
template <typename Derived>
ExpPath<typename Derived::Scalar> exp_path(const Eigen::MatrixBase<Derived>& A, const TimeScale& ts, double t,
                                           double t0) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(A, "ts_exp");
  ExpPath<Scalar> path;
  path.from = ts.snap(t0);
  path.to = ts.snap(t);
  if (path.to < path.from) {
    throw Error(ErrorKind::BackwardWindow, "e_A(t, t0) is only defined for t >= t0");
  }
  path.value = MatrixX<Scalar>::Identity(A.rows(), A.cols());
  if (path.to == path.from) return path;
  for (const auto& piece : ts.partition(path.from, path.to)) {
    MatrixX<Scalar> f = piece_factor(A, piece);
    path.value = (f * path.value).eval();
    path.factors.push_back({piece, std::move(f)});
  }
  return path;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> ts_exp(const Eigen::MatrixBase<Derived>& A, const TimeScale& ts, double t,
                                         double t0) {
  return exp_path(A, ts, t, t0).value;
}

/// e_A(t1, sigma(tau)), the kernel of the variation-of-constants integral.
template <typename Derived>
MatrixX<typename Derived::Scalar> ts_exp_at_sigma(const Eigen::MatrixBase<Derived>& A, const TimeScale& ts,
                                                  double t1, double tau) {
  return ts_exp(A, ts, t1, ts.sigma(tau));
}

/// For every piece of the partition of [t0, t1)_T, the matrix e_A(t1, piece.end).
/// For an atom tau this is e_A(t1, sigma(tau)).
template <typename Derived>
std::vector<MatrixX<typename Derived::Scalar>> exponentials_to_end(const Eigen::MatrixBase<Derived>& A,
                                                                   const std::vector<WindowPiece>& partition) {
  using Scalar = typename Derived::Scalar;
  std::vector<MatrixX<Scalar>> out(partition.size());
  MatrixX<Scalar> acc = MatrixX<Scalar>::Identity(A.rows(), A.cols());
  for (std::size_t p = partition.size(); p-- > 0;) {
    out[p] = acc;
    acc = (acc * piece_factor(A, partition[p])).eval();
  }
  return out;
}

}  // namespace chronos
