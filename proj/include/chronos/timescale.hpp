#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace chronos {

/// Absolute tolerance used for time-point membership and endpoint snapping.
inline constexpr double kTimeTol = 1e-12;

/// Closed real interval [lo, hi]; lo == hi denotes an isolated point.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool degenerate() const { return lo == hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// What unbounded time scale a stored truncation stands for.
enum class ScaleTag { custom, real_line, h_grid, q_grid };

/// A right-scattered point t together with its graininess mu(t) = sigma(t) - t.
struct ScatteredPoint {
  double t = 0.0;
  double mu = 0.0;
};

/// Half-open real interval [begin, end).
struct Segment {
  double begin = 0.0;
  double end = 0.0;

  double length() const { return end - begin; }
};

/// Element of the partition of a window [t0, t1)_T. An atom is a right-scattered
/// point t covering [t, sigma(t)); a continuous piece is a maximal dense run.
struct WindowPiece {
  enum class Kind { atom, continuous };
  Kind kind = Kind::atom;
  double begin = 0.0;
  double end = 0.0;

  bool is_atom() const { return kind == Kind::atom; }
  /// Delta-measure of the piece: graininess for an atom, length otherwise.
  double measure() const { return end - begin; }
};

/// A bounded time scale stored as a canonical finite union of closed intervals.
///
/// Components are sorted with strictly increasing, non-touching endpoints. The
/// tag records which unbounded scale the truncation represents, which only
/// matters for max_graininess().
class TimeScale {
 public:
  TimeScale(std::vector<Interval> components, ScaleTag tag = ScaleTag::custom,
            double parameter = 0.0);

  static TimeScale custom(std::vector<Interval> components);
  static TimeScale points(std::vector<double> pts);
  static TimeScale real_line(double lo, double hi);
  /// {start, start + h, ..., start + (count - 1) h}
  static TimeScale h_grid(double h, double start, std::size_t count);
  /// Integers lo..hi, tagged as a grid with h = 1.
  static TimeScale integers(long lo, long hi);
  /// {first, first q, ..., first q^(count - 1)}
  static TimeScale q_grid(double q, double first, std::size_t count);

  const std::vector<Interval>& components() const { return components_; }
  ScaleTag tag() const { return tag_; }
  /// h for h_grid, q for q_grid, 0 otherwise.
  double parameter() const { return parameter_; }

  double min() const { return components_.front().lo; }
  double max() const { return components_.back().hi; }

  bool contains(double t) const;
  /// Returns the scale point within kTimeTol of t, snapped onto an endpoint when close.
  /// Throws PointNotInScale otherwise.
  double snap(double t) const;

  double sigma(double t) const;
  double rho(double t) const;
  double mu(double t) const;
  bool right_scattered(double t) const { return mu(t) > 0.0; }

  /// sup of mu over the scale; +infinity for q_grid, h for h_grid, 0 for real_line.
  double max_graininess() const;
  /// Largest graininess actually present in the stored components.
  double stored_max_graininess() const;

  /// True when the scale (or [t0, t1]_T) has at least `count` points.
  bool has_at_least(std::size_t count) const;
  bool window_has_at_least(double t0, double t1, std::size_t count) const;

  /// Right-scattered points of [t0, t1)_T in increasing order.
  std::vector<ScatteredPoint> scattered_points(double t0, double t1) const;
  /// Maximal positive-length runs of [t0, t1)_T on which mu vanishes.
  std::vector<Segment> continuous_segments(double t0, double t1) const;
  /// Both of the above merged in time order.
  std::vector<WindowPiece> partition(double t0, double t1) const;

  friend bool operator==(const TimeScale&, const TimeScale&) = default;

 private:
  std::optional<std::size_t> find_component(double t) const;
  void validate_tag() const;

  std::vector<Interval> components_;
  ScaleTag tag_ = ScaleTag::custom;
  double parameter_ = 0.0;
};

/// Finite disjoint union of half-open Delta-intervals [c, d)_T with c, d in T.
class DeltaSet {
 public:
  /// Pieces are snapped onto the scale, sorted, checked for overlap, and touching
  /// pieces are merged. Pieces with c == d are accepted and dropped.
  DeltaSet(TimeScale owner, std::vector<Segment> pieces);

  const TimeScale& owner() const { return owner_; }
  const std::vector<Segment>& pieces() const { return pieces_; }
  bool empty() const;

  /// Partition of the set into atoms and continuous runs, in time order.
  std::vector<WindowPiece> partition() const;

 private:
  TimeScale owner_;
  std::vector<Segment> pieces_;
};

/// Delta-integral of the constant 1 over the set.
double delta_measure(const DeltaSet& set);

}  // namespace chronos
