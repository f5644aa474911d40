#include "chronos/reach.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "chronos/error.hpp"
#include "chronos/tsexp.hpp"

namespace chronos {
namespace {

constexpr std::array<double, 4> kGaussNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                            0.9602898564975363};
constexpr std::array<double, 4> kGaussWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                              0.1012285362903763};

// Composite 8-point Gauss-Legendre rule for a matrix-valued integrand on [a, b].
template <typename F>
Mat gauss_legendre(const F& f, double a, double b, int panels) {
  Mat total;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + h * (p + 0.5);
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
      for (const double sign : {-1.0, 1.0}) {
        Mat v = f(mid + sign * 0.5 * h * kGaussNodes[q]) * (0.5 * h * kGaussWeights[q]);
        if (total.size() == 0) {
          total = std::move(v);
        } else {
          total += v;
        }
      }
    }
  }
  return total;
}

template <typename F>
Mat adaptive_gauss_legendre(const F& f, double a, double b, const QuadratureOptions& quad) {
  Mat prev = gauss_legendre(f, a, b, 1);
  for (int d = 1; d <= quad.max_doublings; ++d) {
    Mat cur = gauss_legendre(f, a, b, 1 << d);
    const double scale = cur.cwiseAbs().maxCoeff();
    if ((cur - prev).cwiseAbs().maxCoeff() <= quad.rel_tol * scale || scale == 0.0) return cur;
    prev = std::move(cur);
  }
  return prev;
}

// int_0^L e^{A s} b b^T e^{A^T s} ds
Mat dense_outer_integral(const Mat& A, const Vec& b, double length, const QuadratureOptions& quad) {
  return adaptive_gauss_legendre(
      [&](double s) {
        const Vec v = expm(A, s) * b;
        return Mat(v * v.transpose());
      },
      0.0, length, quad);
}

void check_spec(const LinearSystem& sys, const GramSpec& spec) {
  const TimeScale& ts = sys.scale();
  const double a = ts.snap(spec.t0);
  const double b = ts.snap(spec.t1);
  if (!(a < b)) throw Error(ErrorKind::EmptyWindow, "Gram window must satisfy t0 < t1");
  for (const auto& [k, set] : spec.sets) {
    if (k < 0 || k >= sys.inputs()) {
      throw Error(ErrorKind::SpecOutsideWindow, "column " + std::to_string(k + 1) + " is not an input of B");
    }
    if (!(set.owner() == ts)) throw Error(ErrorKind::SpecOutsideWindow, "Delta-set belongs to another time scale");
    for (const auto& p : set.pieces()) {
      if (p.begin < a || p.end > b) {
        throw Error(ErrorKind::SpecOutsideWindow, "Delta-set piece leaves the window [t0, t1)");
      }
    }
  }
}

}  // namespace

std::vector<Index> GramSpec::columns() const {
  std::vector<Index> out;
  out.reserve(sets.size());
  for (const auto& [k, set] : sets) out.push_back(k);
  return out;
}

GramSpec window_spec(const LinearSystem& sys, double t0, double t1, const std::vector<Index>& columns) {
  if (columns.empty()) throw Error(ErrorKind::EmptyM, "column selection M is empty");
  GramSpec spec;
  spec.t0 = sys.scale().snap(t0);
  spec.t1 = sys.scale().snap(t1);
  for (Index k : columns) {
    if (k < 0 || k >= sys.inputs()) {
      throw Error(ErrorKind::SpecOutsideWindow, "column " + std::to_string(k + 1) + " is not an input of B");
    }
    spec.sets.insert_or_assign(k, DeltaSet(sys.scale(), {{spec.t0, spec.t1}}));
  }
  return spec;
}

Mat kalman_matrix(const LinearSystem& sys) {
  const Index n = sys.states();
  const Index m = sys.inputs();
  Mat K(n, n * m);
  Mat block = sys.B();
  for (Index j = 0; j < n; ++j) {
    K.middleCols(j * m, m) = block;
    block = (sys.A() * block).eval();
  }
  return K;
}

bool is_positively_accessible(const LinearSystem& sys, double t0, double t1, double tol) {
  if (!sys.scale().window_has_at_least(t0, t1, static_cast<std::size_t>(sys.states()) + 1)) {
    throw Error(ErrorKind::WindowTooSmall, "window needs at least n+1 points");
  }
  return rank(kalman_matrix(sys), tol) == sys.states();
}

Mat gram(const LinearSystem& sys, const GramSpec& spec, const QuadratureOptions& quad) {
  check_spec(sys, spec);
  const TimeScale& ts = sys.scale();
  const Mat& A = sys.A();
  const double t1 = ts.snap(spec.t1);
  Mat W = Mat::Zero(sys.states(), sys.states());
  for (const auto& [k, set] : spec.sets) {
    const Vec bk = sys.B().col(k);
    for (const auto& piece : set.partition()) {
      const Mat E = ts_exp(A, ts, t1, piece.end);
      if (piece.is_atom()) {
        const Vec v = E * bk;
        W.noalias() += piece.measure() * (v * v.transpose());
      } else {
        W.noalias() += E * dense_outer_integral(A, bk, piece.measure(), quad) * E.transpose();
      }
    }
  }
  return W;
}

Mat gram_full(const LinearSystem& sys, double t0, double t1, const QuadratureOptions& quad) {
  std::vector<Index> all(static_cast<std::size_t>(sys.inputs()));
  for (Index k = 0; k < sys.inputs(); ++k) all[static_cast<std::size_t>(k)] = k;
  return gram(sys, window_spec(sys, t0, t1, all), quad);
}

Mat gram_columns(const LinearSystem& sys, double t0, double t1, const std::vector<Index>& columns,
                 const QuadratureOptions& quad) {
  return gram(sys, window_spec(sys, t0, t1, columns), quad);
}

SynthesizedControl synthesize_control(const LinearSystem& sys, const GramSpec& spec, const Mat& W, const Vec& target,
                                      const SynthesisOptions& opts) {
  check_spec(sys, spec);
  const Index n = sys.states();
  if (W.rows() != n || W.cols() != n || !is_monomial(W, opts.tol)) {
    throw Error(ErrorKind::NotMonomialGram, "control synthesis needs a monomial Gram matrix");
  }
  if (target.size() != n) throw Error(ErrorKind::DimensionMismatch, "target has wrong dimension");
  if (target.minCoeff() < 0.0) throw Error(ErrorKind::NegativeTarget, "target must be entrywise nonnegative");

  const TimeScale& ts = sys.scale();
  const Mat& A = sys.A();
  const double t0 = ts.snap(spec.t0);
  const double t1 = ts.snap(spec.t1);
  const Vec w = W.partialPivLu().solve(target);

  struct Pulse {
    double begin;
    double end;
    Index column;
    double value;
  };
  std::vector<Pulse> pulses;
  for (const auto& [k, set] : spec.sets) {
    const Vec bk = sys.B().col(k);
    for (const auto& piece : set.partition()) {
      const Mat E = ts_exp(A, ts, t1, piece.end);
      if (piece.is_atom()) {
        const double value = std::max(0.0, (E * bk).dot(w));
        pulses.push_back({piece.begin, piece.end, k, value});
        continue;
      }
      const std::size_t steps = std::max<std::size_t>(opts.steps_per_segment, 1);
      const double len = piece.measure();
      for (std::size_t s = 0; s < steps; ++s) {
        const double a = piece.begin + len * static_cast<double>(s) / static_cast<double>(steps);
        const double b = s + 1 == steps ? piece.end
                                        : piece.begin + len * static_cast<double>(s + 1) / static_cast<double>(steps);
        const Mat Eb = E * expm(A, piece.end - b);
        // Effect at t1 of a unit input on [a, b) versus the exact contribution of u_k there.
        const Vec effect = Eb * expm_integral(A, b - a) * bk;
        const Vec wanted = gauss_legendre(
            [&](double tau) {
              const Vec v = Eb * expm(A, b - tau) * bk;
              return Mat(v * v.dot(w));
            },
            a, b, 1);
        const double norm2 = effect.squaredNorm();
        const double value = norm2 > 0.0 ? std::max(0.0, effect.dot(wanted) / norm2) : 0.0;
        pulses.push_back({a, b, k, value});
      }
    }
  }

  std::vector<double> breaks{t0};
  for (const auto& p : pulses) {
    breaks.push_back(p.begin);
    breaks.push_back(p.end);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<ControlSegment> segments;
  for (double t : breaks) {
    if (t >= t1) break;
    Vec u = Vec::Zero(sys.inputs());
    for (const auto& p : pulses) {
      if (p.begin <= t && t < p.end) u(p.column) += p.value;
    }
    if (!segments.empty() && segments.back().u == u) continue;
    segments.push_back({t, std::move(u)});
  }

  SynthesizedControl out{target, ControlSignal(ts, t0, t1, std::move(segments), true), Vec(), 0.0};
  SimulationOptions sim;
  sim.dense_samples = 1;
  out.endpoint = simulate(sys, Vec::Zero(n), out.control, t1, sim).final_state();
  out.residual = (out.endpoint - target).cwiseAbs().maxCoeff();
  return out;
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::positively_reachable: return "positively_reachable";
    case Decision::not_positively_reachable: return "not_positively_reachable";
    case Decision::inaccessible: return "inaccessible";
  }
  return "unknown";
}

ReachReport decide_positive_reachability(const LinearSystem& sys, double t0, double t1, const ReachOptions& opts) {
  const auto positivity = is_positive(sys, opts.tol);
  if (!positivity.positive) throw Error(ErrorKind::NotPositiveSystem, positivity.describe());

  const TimeScale& ts = sys.scale();
  const Mat& A = sys.A();
  const Index n = sys.states();
  const Index m = sys.inputs();

  ReachReport report;
  report.t0 = ts.snap(t0);
  report.t1 = ts.snap(t1);
  const auto partition = ts.partition(report.t0, report.t1);
  report.kalman_rank = rank(kalman_matrix(sys), opts.tol);
  if (ts.window_has_at_least(report.t0, report.t1, static_cast<std::size_t>(n) + 1)) {
    report.accessible = report.kalman_rank == n;
  }

  report.diagnostics.resize(static_cast<std::size_t>(n));
  const auto to_end = exponentials_to_end(A, partition);
  const std::size_t probes = std::max<std::size_t>(opts.dense_probes, 1);
  for (std::size_t p = 0; p < partition.size(); ++p) {
    const WindowPiece& piece = partition[p];
    for (Index k = 0; k < m; ++k) {
      const Vec bk = sys.B().col(k);
      std::optional<Index> target;
      if (piece.is_atom()) {
        target = monomial_index(to_end[p] * bk, opts.tol);
      } else {
        // The same i-monomial pattern must appear at every Chebyshev probe.
        for (std::size_t j = 0; j < probes; ++j) {
          const double x = std::cos((2.0 * static_cast<double>(j) + 1.0) * std::numbers::pi /
                                    (2.0 * static_cast<double>(probes)));
          const double tau = piece.begin + piece.measure() * (1.0 - x) / 2.0;
          const auto idx = monomial_index(to_end[p] * expm(A, piece.end - tau) * bk, opts.tol);
          if (!idx || (j > 0 && idx != target)) {
            target.reset();
            break;
          }
          target = idx;
        }
      }
      if (target) report.diagnostics[static_cast<std::size_t>(*target)].push_back({*target, k, piece});
    }
  }

  std::vector<MonomialWitness> chosen;
  for (const auto& candidates : report.diagnostics) {
    if (candidates.empty()) break;
    chosen.push_back(*std::min_element(candidates.begin(), candidates.end(),
                                       [](const MonomialWitness& x, const MonomialWitness& y) {
                                         const auto key = [](const MonomialWitness& w) {
                                           return std::make_tuple(w.piece.is_atom() ? 0 : 1, w.column, w.piece.begin);
                                         };
                                         return key(x) < key(y);
                                       }));
  }

  if (chosen.size() != static_cast<std::size_t>(n)) {
    report.decision = report.accessible == false ? Decision::inaccessible : Decision::not_positively_reachable;
    return report;
  }

  if (report.accessible == false) {
    throw Error(ErrorKind::CertificateCheckFailed, "monomial witnesses found but the Kalman rank test fails");
  }

  std::map<Index, std::vector<Segment>> pieces;
  for (const auto& w : chosen) pieces[w.column].push_back({w.piece.begin, w.piece.end});
  ReachCertificate cert;
  cert.spec.t0 = report.t0;
  cert.spec.t1 = report.t1;
  for (auto& [k, segs] : pieces) cert.spec.sets.insert_or_assign(k, DeltaSet(ts, std::move(segs)));
  cert.W = gram(sys, cert.spec, opts.quadrature);
  if (!is_monomial(cert.W, opts.tol)) {
    throw Error(ErrorKind::CertificateCheckFailed, "Gram matrix over the witness sets is not monomial");
  }
  for (Index i = 0; i < n; ++i) {
    auto control = synthesize_control(sys, cert.spec, cert.W, Vec::Unit(n, i), opts.synthesis);
    if (control.residual > opts.residual_tol) {
      throw Error(ErrorKind::CertificateCheckFailed,
                  "synthesized control for e" + std::to_string(i + 1) + " misses its target");
    }
    cert.controls.push_back(std::move(control));
  }
  report.certificate = std::move(cert);
  report.decision = Decision::positively_reachable;
  return report;
}

bool check_pr_real_line(const LinearSystem& sys, double tol) {
  if (sys.scale().tag() != ScaleTag::real_line) {
    throw Error(ErrorKind::WrongScaleTag, "criterion applies to real_line scales only");
  }
  Mat off = sys.A();
  off.diagonal().setZero();
  const double bound = tol * std::max(1.0, sys.A().cwiseAbs().maxCoeff());
  const bool diagonal = off.size() == 0 || off.cwiseAbs().maxCoeff() <= bound;
  return diagonal && has_monomial_submatrix(sys.B(), tol).complete;
}

Mat homogeneous_reachability_matrix(const LinearSystem& sys, double mu, Index blocks) {
  const Index n = sys.states();
  const Index m = sys.inputs();
  Mat step = mu * sys.A();
  step.diagonal().array() += 1.0;
  Mat out(n, m * blocks);
  Mat block = sys.B();
  for (Index j = 0; j < blocks; ++j) {
    out.middleCols(j * m, m) = block;
    block = (step * block).eval();
  }
  return out;
}

bool check_pr_discrete_homogeneous(const LinearSystem& sys, double t0, Index k, double tol) {
  const TimeScale& ts = sys.scale();
  if (ts.tag() != ScaleTag::h_grid) throw Error(ErrorKind::WrongScaleTag, "criterion applies to h_grid scales only");
  if (k < 1) throw Error(ErrorKind::EmptyWindow, "need at least one step");
  const double mu = ts.parameter();
  const double start = ts.snap(t0);
  ts.snap(start + static_cast<double>(k) * mu);
  const Index blocks = std::min(k, sys.states());
  return has_monomial_submatrix(homogeneous_reachability_matrix(sys, mu, blocks), tol).complete;
}

Mat nonhomogeneous_reachability_matrix(const LinearSystem& sys, double t0, Index k) {
  const TimeScale& ts = sys.scale();
  if (k < 1) throw Error(ErrorKind::EmptyWindow, "need at least one step");
  std::vector<double> mus;
  double t = ts.snap(t0);
  for (Index j = 0; j < k; ++j) {
    const double mu = ts.mu(t);
    if (!(mu > 0.0)) {
      throw Error(ErrorKind::DenseWindow, "point " + std::to_string(t) + " of the window is not right-scattered");
    }
    mus.push_back(mu);
    t = ts.sigma(t);
  }
  const Index n = sys.states();
  const Index m = sys.inputs();
  Mat out(n, m * k);
  Mat prod = Mat::Identity(n, n);
  out.leftCols(m) = sys.B();
  for (Index j = 1; j < k; ++j) {
    Mat step = mus[static_cast<std::size_t>(k - j)] * sys.A();
    step.diagonal().array() += 1.0;
    prod = (prod * step).eval();
    out.middleCols(j * m, m) = prod * sys.B();
  }
  return out;
}

bool check_pr_discrete_nonhomogeneous(const LinearSystem& sys, double t0, Index k, double tol) {
  return has_monomial_submatrix(nonhomogeneous_reachability_matrix(sys, t0, k), tol).complete;
}

}  // namespace chronos
