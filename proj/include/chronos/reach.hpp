#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "chronos/matrices.hpp"
#include "chronos/system.hpp"
#include "chronos/timescale.hpp"

namespace chronos {

/// Column selection M (the keys, 0-based) and one Delta-set S_k per selected column.
struct GramSpec {
  double t0 = 0.0;
  double t1 = 0.0;
  std::map<Index, DeltaSet> sets;

  std::vector<Index> columns() const;
};

/// S_k = [t0, t1) for every k in columns.
GramSpec window_spec(const LinearSystem& sys, double t0, double t1, const std::vector<Index>& columns);

struct QuadratureOptions {
  double rel_tol = 1e-10;  // successive panel doublings must agree to this
  int max_doublings = 12;
};

/// [B, AB, ..., A^{n-1} B]
Mat kalman_matrix(const LinearSystem& sys);

/// Rank test on a window with at least n+1 points; WindowTooSmall otherwise.
bool is_positively_accessible(const LinearSystem& sys, double t0, double t1, double tol = kDefaultTol);

/// sum_k int_{S_k} e_A(t1, sigma(tau)) b_k b_k^T e_A(t1, sigma(tau))^T Delta tau.
/// Atoms contribute mu v v^T exactly; dense runs use composite 8-point Gauss-Legendre.
Mat gram(const LinearSystem& sys, const GramSpec& spec, const QuadratureOptions& quad = {});
Mat gram_full(const LinearSystem& sys, double t0, double t1, const QuadratureOptions& quad = {});
Mat gram_columns(const LinearSystem& sys, double t0, double t1, const std::vector<Index>& columns,
                 const QuadratureOptions& quad = {});

struct SynthesisOptions {
  std::size_t steps_per_segment = 64;
  double tol = kDefaultTol;
};

struct SynthesizedControl {
  Vec target;
  ControlSignal control;
  Vec endpoint;
  double residual = 0.0;  // max-norm distance between endpoint and target
};

/// Nonnegative control u_k(tau) = b_k^T e_A(t1, sigma(tau))^T W^{-1} target on S_k,
/// zero elsewhere. Dense runs are discretized into piecewise-constant steps.
SynthesizedControl synthesize_control(const LinearSystem& sys, const GramSpec& spec, const Mat& W,
                                      const Vec& target, const SynthesisOptions& opts = {});

/// inaccessible is reported when the Kalman test fails on a window with at least n+1 points.
enum class Decision { positively_reachable, not_positively_reachable, inaccessible };

std::string_view to_string(Decision d);

/// A piece of the window on which e_A(t1, sigma(tau)) b_column is target-monomial.
struct MonomialWitness {
  Index target = 0;
  Index column = 0;
  WindowPiece piece;
};

struct ReachCertificate {
  GramSpec spec;
  Mat W;
  std::vector<SynthesizedControl> controls;  // one per basis vector e_i
};

struct ReachReport {
  Decision decision = Decision::not_positively_reachable;
  double t0 = 0.0;
  double t1 = 0.0;
  Index kalman_rank = 0;
  std::optional<bool> accessible;  // empty when the window has fewer than n+1 points
  std::optional<ReachCertificate> certificate;
  std::vector<std::vector<MonomialWitness>> diagnostics;  // indexed by target i

  bool reachable() const { return decision == Decision::positively_reachable; }
};

struct ReachOptions {
  double tol = kDefaultTol;
  std::size_t dense_probes = 9;  // Chebyshev samples per continuous run
  double residual_tol = 1e-6;
  SynthesisOptions synthesis;
  QuadratureOptions quadrature;
};

/// Decides positive reachability on [t0, t1]_T for a positive system by collecting,
/// for each target i and input column k, the pieces on which e_A(t1, sigma(tau)) b_k
/// is i-monomial. On success the certificate holds a monomial Gram matrix and one
/// verified control per basis vector.
ReachReport decide_positive_reachability(const LinearSystem& sys, double t0, double t1,
                                         const ReachOptions& opts = {});

/// Continuous-time criterion: A diagonal and B has a monomial n x n submatrix.
bool check_pr_real_line(const LinearSystem& sys, double tol = kDefaultTol);

/// [B, (I + mu A) B, ..., (I + mu A)^{blocks-1} B]
Mat homogeneous_reachability_matrix(const LinearSystem& sys, double mu, Index blocks);

/// mu Z criterion for t1 = t0 + k mu, evaluated on min(k, n) blocks.
bool check_pr_discrete_homogeneous(const LinearSystem& sys, double t0, Index k, double tol = kDefaultTol);

/// Blocks e_A(t1, sigma(tau)) B for tau = sigma^{k-1}(t0), ..., t0 with t1 = sigma^k(t0),
/// i.e. B, (I + mu(sigma^{k-1} t0) A) B, and so on. Every point passed must be right-scattered.
Mat nonhomogeneous_reachability_matrix(const LinearSystem& sys, double t0, Index k);

bool check_pr_discrete_nonhomogeneous(const LinearSystem& sys, double t0, Index k, double tol = kDefaultTol);

}  // namespace chronos
