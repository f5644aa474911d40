#include "chronos/system.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "chronos/error.hpp"
#include "chronos/tsexp.hpp"

namespace chronos {
namespace {

bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace

LinearSystem::LinearSystem(TimeScale scale, Mat A, Mat B)
    : scale_(std::move(scale)), A_(std::move(A)), B_(std::move(B)) {
  if (A_.rows() == 0 || A_.rows() != A_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "A must be a nonempty square matrix");
  }
  if (B_.rows() != A_.rows() || B_.cols() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "B must have as many rows as A and at least one column");
  }
  if (!all_finite(A_) || !all_finite(B_)) {
    throw Error(ErrorKind::DimensionMismatch, "system matrices must be finite");
  }
  if (!scale_.has_at_least(static_cast<std::size_t>(A_.rows()) + 1)) {
    throw Error(ErrorKind::WindowTooSmall, "time scale needs at least n+1 points");
  }
}

ControlSignal::ControlSignal(const TimeScale& ts, double t0, double t1, std::vector<ControlSegment> segments,
                             bool nonnegative)
    : t0_(ts.snap(t0)), t1_(ts.snap(t1)), segments_(std::move(segments)), nonnegative_(nonnegative) {
  if (!(t0_ < t1_)) throw Error(ErrorKind::EmptyWindow, "control domain must satisfy t0 < t1");
  if (segments_.empty()) throw Error(ErrorKind::DomainMismatch, "control needs at least one segment");
  const Index m = segments_.front().u.size();
  if (m == 0) throw Error(ErrorKind::DomainMismatch, "control values must be nonempty");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    auto& seg = segments_[i];
    seg.t = ts.snap(seg.t);
    if (seg.u.size() != m) throw Error(ErrorKind::DomainMismatch, "control values differ in length");
    if (!seg.u.allFinite()) throw Error(ErrorKind::DomainMismatch, "control values must be finite");
    if (nonnegative_ && seg.u.size() > 0 && seg.u.minCoeff() < 0.0) {
      throw Error(ErrorKind::DomainMismatch, "control flagged nonnegative has a negative value");
    }
    if (i == 0 && seg.t != t0_) throw Error(ErrorKind::DomainMismatch, "first segment must start at t0");
    if (i > 0 && !(seg.t > segments_[i - 1].t)) {
      throw Error(ErrorKind::DomainMismatch, "segment start times must increase");
    }
    if (!(seg.t < t1_)) throw Error(ErrorKind::DomainMismatch, "segment starts past the control domain");
  }
}

ControlSignal ControlSignal::zero(const TimeScale& ts, double t0, double t1, Index inputs) {
  return ControlSignal(ts, t0, t1, {{t0, Vec::Zero(inputs)}}, true);
}

const Vec& ControlSignal::value_at(double t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t + kTimeTol,
                             [](double v, const ControlSegment& s) { return v < s.t; });
  if (it == segments_.begin()) return segments_.front().u;
  return std::prev(it)->u;
}

ExtMat positivity_matrix(const LinearSystem& sys) {
  return ExtMat::identity_over(sys.states(), sys.scale().max_graininess()) + sys.A();
}

std::string PositivityReport::describe() const {
  if (positive) return "positive";
  if (!failure) return "not positive";
  std::ostringstream os;
  os.precision(17);
  os << (failure->source == Source::a_t ? "A_T" : "B") << "(" << failure->row + 1 << "," << failure->col + 1
     << ") = " << failure->value << " < 0";
  return os.str();
}

PositivityReport is_positive(const LinearSystem& sys, double tol) {
  PositivityReport report;
  report.a_t = positivity_matrix(sys);
  auto first_negative = [tol](const Mat& m) -> std::optional<std::pair<Index, Index>> {
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i < m.rows(); ++i) {
        if (m(i, j) < -tol) return std::make_pair(i, j);
      }
    }
    return std::nullopt;
  };
  if (auto at = first_negative(report.a_t.entries())) {
    report.failure = {PositivityReport::Source::a_t, at->first, at->second, report.a_t(at->first, at->second)};
  } else if (auto b = first_negative(sys.B())) {
    report.failure = {PositivityReport::Source::b, b->first, b->second, sys.B()(b->first, b->second)};
  }
  report.positive = !report.failure.has_value();
  return report;
}

std::optional<ExpNegativity> exp_nonneg_witness(const LinearSystem& sys, double t0, double t1, std::size_t samples,
                                                double tol) {
  const TimeScale& ts = sys.scale();
  const Mat& A = sys.A();
  const double a = ts.snap(t0);
  const double b = ts.snap(t1);

  auto negative_entry = [tol](const Mat& E) -> std::optional<std::pair<Index, Index>> {
    const double bound = -tol * std::max(1.0, E.cwiseAbs().maxCoeff());
    Index i = 0, j = 0;
    if (E.minCoeff(&i, &j) < bound) return std::make_pair(i, j);
    return std::nullopt;
  };

  if (a < b) {
    std::vector<double> pts{a, b};
    for (const auto& piece : ts.partition(a, b)) {
      pts.push_back(piece.begin);
      pts.push_back(piece.end);
      if (piece.is_atom()) continue;
      const double len = piece.measure();
      for (std::size_t j = 1; j < samples; ++j) {
        pts.push_back(piece.begin + len * static_cast<double>(j) / static_cast<double>(samples));
      }
      // Geometrically shrinking steps from the start of the run.
      for (double frac = 1e-1; frac >= 1e-6; frac /= 10.0) pts.push_back(piece.begin + frac * len);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<Mat> steps;
    steps.reserve(pts.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) steps.push_back(ts_exp(A, ts, pts[i + 1], pts[i]));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      Mat E = Mat::Identity(A.rows(), A.cols());
      for (std::size_t j = i; j + 1 < pts.size(); ++j) {
        E = (steps[j] * E).eval();
        if (auto neg = negative_entry(E)) {
          return ExpNegativity{pts[j + 1], pts[i], neg->first, neg->second, E(neg->first, neg->second)};
        }
      }
    }
  }

  // The declared grid continues past the stored truncation.
  auto probe_step = [&](double t, double mu) -> std::optional<ExpNegativity> {
    Mat E = mu * A;
    E.diagonal().array() += 1.0;
    if (auto neg = negative_entry(E)) return ExpNegativity{t + mu, t, neg->first, neg->second, E(neg->first, neg->second)};
    return std::nullopt;
  };
  if (ts.tag() == ScaleTag::h_grid) {
    return probe_step(ts.max(), ts.parameter());
  }
  if (ts.tag() == ScaleTag::q_grid) {
    const double q = ts.parameter();
    for (double t = ts.min(); (q - 1.0) * t <= 1e12; t *= q) {
      if (auto w = probe_step(t, (q - 1.0) * t)) return w;
    }
  }
  return std::nullopt;
}

Trajectory simulate(const LinearSystem& sys, const Vec& x0, const ControlSignal& u, double t_end,
                    const SimulationOptions& opts) {
  const TimeScale& ts = sys.scale();
  const Mat& A = sys.A();
  const Mat& B = sys.B();
  if (x0.size() != sys.states()) throw Error(ErrorKind::DomainMismatch, "initial state has wrong dimension");
  if (!x0.allFinite()) throw Error(ErrorKind::NonFiniteState, "initial state is not finite");
  if (u.inputs() != sys.inputs()) throw Error(ErrorKind::DomainMismatch, "control has wrong number of inputs");
  const double t0 = u.t0();
  const double end = ts.snap(t_end);
  if (end < t0 || end > u.t1()) throw Error(ErrorKind::DomainMismatch, "t_end lies outside the control domain");
  for (const auto& seg : u.segments()) ts.snap(seg.t);

  Trajectory traj;
  Vec x = x0;
  auto record = [&](double t, const Vec& state) {
    if (!state.allFinite()) throw Error(ErrorKind::NonFiniteState, "state diverged");
    if (!traj.t.empty() && t <= traj.t.back()) return;
    traj.t.push_back(t);
    traj.x.push_back(state);
  };
  record(t0, x);
  if (end == t0) return traj;

  for (const auto& piece : ts.partition(t0, end)) {
    if (piece.is_atom()) {
      record(piece.begin, x);
      const double mu = piece.measure();
      x = (x + mu * (A * x + B * u.value_at(piece.begin))).eval();
      record(piece.end, x);
      continue;
    }
    // The state is propagated across control switches only; the equispaced
    // samples are evaluated from the nearest preceding switch.
    std::vector<double> events{piece.begin, piece.end};
    for (const auto& seg : u.segments()) {
      if (seg.t > piece.begin && seg.t < piece.end) events.push_back(seg.t);
    }
    std::sort(events.begin(), events.end());
    const std::size_t n = std::max<std::size_t>(opts.dense_samples, 1);
    std::size_t next_sample = 1;
    auto sample_time = [&](std::size_t j) {
      return piece.begin + piece.measure() * static_cast<double>(j) / static_cast<double>(n);
    };
    record(piece.begin, x);
    for (std::size_t j = 0; j + 1 < events.size(); ++j) {
      const double a = events[j];
      const double d = events[j + 1] - a;
      if (d <= 0.0) continue;
      const Vec f = B * u.value_at(a);
      for (; next_sample < n && sample_time(next_sample) < events[j + 1]; ++next_sample) {
        const double s = sample_time(next_sample) - a;
        if (s > 0.0) record(a + s, (expm(A, s) * x + expm_integral(A, s) * f).eval());
      }
      x = (expm(A, d) * x + expm_integral(A, d) * f).eval();
      record(events[j + 1], x);
    }
  }
  return traj;
}

ControlSignal random_nonneg_control(const LinearSystem& sys, double t0, double t1, std::uint64_t seed,
                                    std::uint64_t index, const SamplingOptions& opts) {
  const TimeScale& ts = sys.scale();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> dist(0.0, opts.u_max);

  std::vector<double> starts;
  for (const auto& piece : ts.partition(t0, t1)) {
    starts.push_back(piece.begin);
    if (piece.is_atom()) continue;
    const std::size_t k = std::max<std::size_t>(opts.dense_switches, 1);
    for (std::size_t j = 1; j < k; ++j) {
      starts.push_back(piece.begin + piece.measure() * static_cast<double>(j) / static_cast<double>(k));
    }
  }
  std::vector<ControlSegment> segments;
  segments.reserve(starts.size());
  for (double s : starts) {
    Vec v(sys.inputs());
    for (Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
    segments.push_back({s, std::move(v)});
  }
  return ControlSignal(ts, t0, t1, std::move(segments), true);
}

std::vector<Vec> sample_positive_reachable(const LinearSystem& sys, double t0, double t1, std::size_t n_controls,
                                           std::uint64_t seed, const SamplingOptions& opts) {
  const auto report = is_positive(sys);
  if (!report.positive) throw Error(ErrorKind::NotPositiveSystem, report.describe());
  std::vector<Vec> out;
  out.reserve(n_controls);
  const Vec zero = Vec::Zero(sys.states());
  for (std::size_t i = 0; i < n_controls; ++i) {
    const ControlSignal u = i == 0 ? ControlSignal::zero(sys.scale(), t0, t1, sys.inputs())
                                   : random_nonneg_control(sys, t0, t1, seed, i, opts);
    out.push_back(simulate(sys, zero, u, t1).final_state());
  }
  return out;
}

}  // namespace chronos
