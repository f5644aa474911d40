#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "chronos/error.hpp"

namespace chronos {

/// Default relative tolerance for sign and monomiality tests.
inline constexpr double kDefaultTol = 1e-9;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatrixX<double>;
using Vec = VectorX<double>;
using Eigen::Index;

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& X, const char* what) {
  if (X.rows() != X.cols()) {
    throw Error(ErrorKind::NotSquare, std::string(what) + " needs a square matrix, got " +
                                          std::to_string(X.rows()) + "x" + std::to_string(X.cols()));
  }
}

// Degree-13 Pade approximant of exp on a matrix with 1-norm below theta_13.
template <typename Scalar>
MatrixX<Scalar> pade13(const MatrixX<Scalar>& A) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  const Index n = A.rows();
  const MatrixX<Scalar> I = MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> A2 = A * A;
  const MatrixX<Scalar> A4 = A2 * A2;
  const MatrixX<Scalar> A6 = A4 * A2;
  auto c = [](int k) { return static_cast<Scalar>(b[k]); };

  const MatrixX<Scalar> Ut = A6 * (c(13) * A6 + c(11) * A4 + c(9) * A2) + c(7) * A6 + c(5) * A4 +
                             c(3) * A2 + c(1) * I;
  const MatrixX<Scalar> U = A * Ut;
  const MatrixX<Scalar> V = A6 * (c(12) * A6 + c(10) * A4 + c(8) * A2) + c(6) * A6 + c(4) * A4 +
                            c(2) * A2 + c(0) * I;
  return (V - U).partialPivLu().solve(V + U);
}

}  // namespace detail

/// e^{X s} by scaling and squaring around a degree-13 Pade core.
template <typename Derived>
MatrixX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& X,
                                       typename Derived::Scalar s = 1) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(X, "expm");
  const Index n = X.rows();
  if (s == Scalar(0) || n == 0) return MatrixX<Scalar>::Identity(n, n);

  MatrixX<Scalar> A = X * s;
  const Scalar norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == Scalar(0)) return MatrixX<Scalar>::Identity(n, n);
  constexpr double theta13 = 5.371920351148152;
  int squarings = 0;
  if (norm1 > Scalar(theta13)) {
    squarings = static_cast<int>(std::ceil(std::log2(static_cast<double>(norm1) / theta13)));
    A /= std::ldexp(Scalar(1), squarings);
  }
  MatrixX<Scalar> R = detail::pade13<Scalar>(A);
  for (int i = 0; i < squarings; ++i) R = (R * R).eval();
  return R;
}

/// Integral of e^{X tau} over tau in [0, s], read off the top-right block of
/// exp([[X, I], [0, 0]] s).
template <typename Derived>
MatrixX<typename Derived::Scalar> expm_integral(const Eigen::MatrixBase<Derived>& X,
                                                typename Derived::Scalar s) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(X, "expm_integral");
  if (s < Scalar(0)) throw Error(ErrorKind::NegativeHorizon, "integration horizon must be >= 0");
  const Index n = X.rows();
  if (s == Scalar(0)) return MatrixX<Scalar>::Zero(n, n);
  MatrixX<Scalar> block = MatrixX<Scalar>::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = X;
  block.topRightCorner(n, n).setIdentity();
  return expm(block, s).topRightCorner(n, n);
}

/// Numerical rank: singular values above tol times the largest one.
template <typename Derived>
Index rank(const Eigen::MatrixBase<Derived>& X, double tol = kDefaultTol) {
  using Scalar = typename Derived::Scalar;
  if (X.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(X.eval());
  const auto& sv = svd.singularValues();
  const Scalar largest = sv.size() > 0 ? sv(0) : Scalar(0);
  if (!(largest > Scalar(0))) return 0;
  return static_cast<Index>((sv.array() > Scalar(tol) * largest).count());
}

template <typename Derived>
bool is_nonneg(const Eigen::MatrixBase<Derived>& X, double tol = kDefaultTol) {
  return X.size() == 0 || X.minCoeff() >= -typename Derived::Scalar(tol);
}

/// Index i such that v is i-monomial: v_i > tol and every other |v_j| <= tol * max|v|.
template <typename Derived>
std::optional<Index> monomial_index(const Eigen::MatrixBase<Derived>& v, double tol = kDefaultTol) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) return std::nullopt;
  const auto flat = v.reshaped();
  Index top = 0;
  flat.maxCoeff(&top);
  if (!(flat(top) > Scalar(tol))) return std::nullopt;
  const Scalar bound = Scalar(tol) * flat.cwiseAbs().maxCoeff();
  for (Index j = 0; j < flat.size(); ++j) {
    if (j != top && std::abs(flat(j)) > bound) return std::nullopt;
  }
  return top;
}

/// Every column and every row monomial, i.e. columns monomial with distinct indices.
template <typename Derived>
bool is_monomial(const Eigen::MatrixBase<Derived>& X, double tol = kDefaultTol) {
  detail::require_square(X, "is_monomial");
  std::vector<bool> used(static_cast<std::size_t>(X.rows()), false);
  for (Index j = 0; j < X.cols(); ++j) {
    const auto i = monomial_index(X.col(j), tol);
    if (!i || used[static_cast<std::size_t>(*i)]) return false;
    used[static_cast<std::size_t>(*i)] = true;
  }
  return true;
}

/// For each row index i, the first column of X that is i-monomial (if any).
struct MonomialCover {
  bool complete = false;
  std::vector<std::optional<Index>> columns;
};

template <typename Derived>
MonomialCover has_monomial_submatrix(const Eigen::MatrixBase<Derived>& X, double tol = kDefaultTol) {
  MonomialCover cover;
  cover.columns.assign(static_cast<std::size_t>(X.rows()), std::nullopt);
  for (Index j = 0; j < X.cols(); ++j) {
    if (const auto i = monomial_index(X.col(j), tol)) {
      auto& slot = cover.columns[static_cast<std::size_t>(*i)];
      if (!slot) slot = j;
    }
  }
  cover.complete = std::all_of(cover.columns.begin(), cover.columns.end(),
                               [](const auto& c) { return c.has_value(); });
  return cover;
}

/// Matrix over the reals extended by +infinity. Only construction, addition of
/// a finite matrix, and sign tests are meaningful.
template <typename Scalar>
class ExtMatrix {
 public:
  explicit ExtMatrix(MatrixX<Scalar> entries) : entries_(std::move(entries)) {}

  /// I / mu_bar with I/0 = diag(inf) and I/inf = 0.
  static ExtMatrix identity_over(Index n, Scalar mu_bar) {
    MatrixX<Scalar> m = MatrixX<Scalar>::Zero(n, n);
    const Scalar d = mu_bar == Scalar(0) ? std::numeric_limits<Scalar>::infinity()
                     : std::isinf(mu_bar) ? Scalar(0)
                                          : Scalar(1) / mu_bar;
    m.diagonal().setConstant(d);
    return ExtMatrix(std::move(m));
  }

  template <typename Derived>
  ExtMatrix operator+(const Eigen::MatrixBase<Derived>& finite) const {
    if (finite.rows() != rows() || finite.cols() != cols()) {
      throw Error(ErrorKind::DimensionMismatch, "ExtMatrix addition with mismatched shapes");
    }
    return ExtMatrix(entries_ + finite);
  }

  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }
  Scalar operator()(Index i, Index j) const { return entries_(i, j); }
  bool is_infinite(Index i, Index j) const { return std::isinf(entries_(i, j)); }
  const MatrixX<Scalar>& entries() const { return entries_; }

  bool is_nonneg(double tol = kDefaultTol) const { return chronos::is_nonneg(entries_, tol); }

 private:
  MatrixX<Scalar> entries_;
};

using ExtMat = ExtMatrix<double>;

}  // namespace chronos
