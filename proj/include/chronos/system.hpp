#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chronos/matrices.hpp"
#include "chronos/timescale.hpp"

namespace chronos {

/// x^Delta(t) = A x(t) + B u(t) on a time scale.
class LinearSystem {
 public:
  LinearSystem(TimeScale scale, Mat A, Mat B);

  const TimeScale& scale() const { return scale_; }
  const Mat& A() const { return A_; }
  const Mat& B() const { return B_; }
  Index states() const { return A_.rows(); }
  Index inputs() const { return B_.cols(); }

 private:
  TimeScale scale_;
  Mat A_;
  Mat B_;
};

struct ControlSegment {
  double t = 0.0;
  Vec u;
};

/// Piecewise-constant, right-continuous input on [t0, t1)_T. Each segment holds
/// its value until the next segment starts.
class ControlSignal {
 public:
  ControlSignal(const TimeScale& ts, double t0, double t1, std::vector<ControlSegment> segments,
                bool nonnegative = false);

  static ControlSignal zero(const TimeScale& ts, double t0, double t1, Index inputs);

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  Index inputs() const { return segments_.front().u.size(); }
  bool nonnegative() const { return nonnegative_; }
  const std::vector<ControlSegment>& segments() const { return segments_; }

  const Vec& value_at(double t) const;

 private:
  double t0_;
  double t1_;
  std::vector<ControlSegment> segments_;
  bool nonnegative_;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> x;

  const Vec& final_state() const { return x.back(); }
};

/// A + I / mu_bar, with mu_bar taken from the scale's tag.
ExtMat positivity_matrix(const LinearSystem& sys);

struct PositivityReport {
  enum class Source { a_t, b };
  struct Failure {
    Source source;
    Index row;
    Index col;
    double value;
  };

  bool positive = false;
  ExtMat a_t{Mat()};
  std::optional<Failure> failure;

  std::string describe() const;
};

PositivityReport is_positive(const LinearSystem& sys, double tol = kDefaultTol);

/// A pair t >= t0 at which e_A(t, t0) has a negative entry.
struct ExpNegativity {
  double t = 0.0;
  double t0 = 0.0;
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Searches sampled pairs of [t0, t1]_T for a negative entry of e_A(t, t0) below
/// -tol (relative to max(1, |e_A|)). Grid-tagged scales are also probed at the
/// graininess values of the declared unbounded grid. A sampling oracle, not a
/// decision procedure.
std::optional<ExpNegativity> exp_nonneg_witness(const LinearSystem& sys, double t0, double t1,
                                                std::size_t samples = 8, double tol = kDefaultTol);

struct SimulationOptions {
  std::size_t dense_samples = 32;  // per continuous segment, reporting only
};

/// Forward solution from x(t0) = x0: the one-step law on scattered points and the
/// closed form e^{A d} x + (int_0^d e^{A s} ds) B u on dense runs.
Trajectory simulate(const LinearSystem& sys, const Vec& x0, const ControlSignal& u, double t_end,
                    const SimulationOptions& opts = {});

struct SamplingOptions {
  double u_max = 1.0;
  std::size_t dense_switches = 4;  // equispaced switch points per continuous segment
};

/// Random nonnegative control switching at every scattered point of the window
/// and at equispaced points of its dense runs. The stream depends only on (seed, index).
ControlSignal random_nonneg_control(const LinearSystem& sys, double t0, double t1, std::uint64_t seed,
                                    std::uint64_t index, const SamplingOptions& opts = {});

/// Endpoints x(t1) from 0 under n_controls random nonnegative controls; index 0 is u = 0.
std::vector<Vec> sample_positive_reachable(const LinearSystem& sys, double t0, double t1,
                                           std::size_t n_controls, std::uint64_t seed,
                                           const SamplingOptions& opts = {});

}  // namespace chronos
