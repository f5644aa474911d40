#include "chronos/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chronos/error.hpp"

namespace chronos {
namespace {

std::string describe(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

std::vector<Interval> canonicalize(std::vector<Interval> components) {
  if (components.empty()) {
    throw Error(ErrorKind::InvalidTimeScale, "time scale must be nonempty");
  }
  for (const auto& c : components) {
    if (!std::isfinite(c.lo) || !std::isfinite(c.hi) || c.lo > c.hi) {
      throw Error(ErrorKind::InvalidTimeScale,
                  "component [" + describe(c.lo) + ", " + describe(c.hi) + "] is not a closed interval");
    }
  }
  std::sort(components.begin(), components.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  merged.reserve(components.size());
  for (const auto& c : components) {
    if (!merged.empty() && c.lo <= merged.back().hi + kTimeTol) {
      merged.back().hi = std::max(merged.back().hi, c.hi);
    } else {
      merged.push_back(c);
    }
  }
  return merged;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TimeScale::TimeScale(std::vector<Interval> components, ScaleTag tag, double parameter)
    : components_(canonicalize(std::move(components))), tag_(tag), parameter_(parameter) {
  validate_tag();
}

void TimeScale::validate_tag() const {
  switch (tag_) {
    case ScaleTag::custom:
      return;
    case ScaleTag::real_line:
      if (components_.size() != 1 || components_.front().degenerate()) {
        throw Error(ErrorKind::InvalidTimeScale, "real_line truncation must be one nondegenerate interval");
      }
      return;
    case ScaleTag::h_grid:
      if (!(parameter_ > 0.0) || !std::isfinite(parameter_)) {
        throw Error(ErrorKind::InvalidTimeScale, "h_grid needs h > 0");
      }
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (!components_[i].degenerate()) {
          throw Error(ErrorKind::InvalidTimeScale, "h_grid components must be isolated points");
        }
        if (i > 0 && !close(components_[i].lo - components_[i - 1].lo, parameter_, 1e-9)) {
          throw Error(ErrorKind::InvalidTimeScale, "h_grid points must be spaced by h");
        }
      }
      return;
    case ScaleTag::q_grid:
      if (!(parameter_ > 1.0) || !std::isfinite(parameter_)) {
        throw Error(ErrorKind::InvalidTimeScale, "q_grid needs q > 1");
      }
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (!components_[i].degenerate() || !(components_[i].lo > 0.0)) {
          throw Error(ErrorKind::InvalidTimeScale, "q_grid components must be positive isolated points");
        }
        if (i > 0 && !close(components_[i].lo, components_[i - 1].lo * parameter_, 1e-9)) {
          throw Error(ErrorKind::InvalidTimeScale, "q_grid points must grow by the factor q");
        }
      }
      return;
  }
}

TimeScale TimeScale::custom(std::vector<Interval> components) {
  return TimeScale(std::move(components), ScaleTag::custom);
}

TimeScale TimeScale::points(std::vector<double> pts) {
  std::vector<Interval> comps;
  comps.reserve(pts.size());
  for (double p : pts) comps.push_back({p, p});
  return TimeScale(std::move(comps), ScaleTag::custom);
}

TimeScale TimeScale::real_line(double lo, double hi) {
  return TimeScale({{lo, hi}}, ScaleTag::real_line);
}

TimeScale TimeScale::h_grid(double h, double start, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::InvalidTimeScale, "h_grid needs at least one point");
  std::vector<Interval> comps;
  comps.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double p = start + static_cast<double>(i) * h;
    comps.push_back({p, p});
  }
  return TimeScale(std::move(comps), ScaleTag::h_grid, h);
}

TimeScale TimeScale::integers(long lo, long hi) {
  if (hi < lo) throw Error(ErrorKind::InvalidTimeScale, "empty integer range");
  return h_grid(1.0, static_cast<double>(lo), static_cast<std::size_t>(hi - lo + 1));
}

TimeScale TimeScale::q_grid(double q, double first, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::InvalidTimeScale, "q_grid needs at least one point");
  std::vector<Interval> comps;
  comps.reserve(count);
  double p = first;
  for (std::size_t i = 0; i < count; ++i, p *= q) comps.push_back({p, p});
  return TimeScale(std::move(comps), ScaleTag::q_grid, q);
}

std::optional<std::size_t> TimeScale::find_component(double t) const {
  auto it = std::upper_bound(components_.begin(), components_.end(), t + kTimeTol,
                             [](double v, const Interval& c) { return v < c.lo; });
  if (it == components_.begin()) return std::nullopt;
  --it;
  if (t > it->hi + kTimeTol) return std::nullopt;
  return static_cast<std::size_t>(it - components_.begin());
}

bool TimeScale::contains(double t) const { return find_component(t).has_value(); }

double TimeScale::snap(double t) const {
  const auto idx = find_component(t);
  if (!idx) throw Error(ErrorKind::PointNotInScale, describe(t) + " is not a point of the time scale");
  const Interval& c = components_[*idx];
  if (std::abs(t - c.lo) <= kTimeTol) return c.lo;
  if (std::abs(t - c.hi) <= kTimeTol) return c.hi;
  return t;
}

double TimeScale::sigma(double t) const {
  const double s = snap(t);
  const std::size_t i = *find_component(s);
  if (s < components_[i].hi) return s;
  return i + 1 < components_.size() ? components_[i + 1].lo : s;
}

double TimeScale::rho(double t) const {
  const double s = snap(t);
  const std::size_t i = *find_component(s);
  if (s > components_[i].lo) return s;
  return i > 0 ? components_[i - 1].hi : s;
}

double TimeScale::mu(double t) const { return sigma(t) - snap(t); }

double TimeScale::stored_max_graininess() const {
  double best = 0.0;
  for (std::size_t i = 1; i < components_.size(); ++i) {
    best = std::max(best, components_[i].lo - components_[i - 1].hi);
  }
  return best;
}

double TimeScale::max_graininess() const {
  switch (tag_) {
    case ScaleTag::real_line: return 0.0;
    case ScaleTag::h_grid: return parameter_;
    case ScaleTag::q_grid: return std::numeric_limits<double>::infinity();
    case ScaleTag::custom: break;
  }
  return stored_max_graininess();
}

bool TimeScale::has_at_least(std::size_t count) const {
  return window_has_at_least(min(), max(), count);
}

bool TimeScale::window_has_at_least(double t0, double t1, std::size_t count) const {
  const double a = snap(t0);
  const double b = snap(t1);
  std::size_t seen = 0;
  for (const auto& c : components_) {
    const double lo = std::max(c.lo, a);
    const double hi = std::min(c.hi, b);
    if (lo > hi) continue;
    if (lo < hi) return true;
    if (++seen >= count) return true;
  }
  return seen >= count;
}

std::vector<WindowPiece> TimeScale::partition(double t0, double t1) const {
  const double a = snap(t0);
  const double b = snap(t1);
  if (!(a < b)) {
    throw Error(ErrorKind::EmptyWindow, "window [" + describe(t0) + ", " + describe(t1) + ") is empty");
  }
  std::vector<WindowPiece> out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Interval& c = components_[i];
    if (c.lo >= b) break;
    if (c.hi < a) continue;
    if (!c.degenerate()) {
      const double lo = std::max(c.lo, a);
      const double hi = std::min(c.hi, b);
      if (lo < hi) out.push_back({WindowPiece::Kind::continuous, lo, hi});
    }
    // The right endpoint of a component is right-scattered unless it is the maximum.
    if (c.hi >= a && c.hi < b && i + 1 < components_.size()) {
      out.push_back({WindowPiece::Kind::atom, c.hi, components_[i + 1].lo});
    }
  }
  return out;
}

std::vector<ScatteredPoint> TimeScale::scattered_points(double t0, double t1) const {
  std::vector<ScatteredPoint> out;
  for (const auto& p : partition(t0, t1)) {
    if (p.is_atom()) out.push_back({p.begin, p.measure()});
  }
  return out;
}

std::vector<Segment> TimeScale::continuous_segments(double t0, double t1) const {
  std::vector<Segment> out;
  for (const auto& p : partition(t0, t1)) {
    if (!p.is_atom()) out.push_back({p.begin, p.end});
  }
  return out;
}

DeltaSet::DeltaSet(TimeScale owner, std::vector<Segment> pieces) : owner_(std::move(owner)) {
  for (auto& p : pieces) {
    p.begin = owner_.snap(p.begin);
    p.end = owner_.snap(p.end);
    if (p.end < p.begin) {
      throw Error(ErrorKind::InvalidDeltaSet,
                  "piece [" + describe(p.begin) + ", " + describe(p.end) + ") is reversed");
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Segment& x, const Segment& y) { return x.begin < y.begin; });
  for (const auto& p : pieces) {
    if (!pieces_.empty() && p.begin < pieces_.back().end) {
      throw Error(ErrorKind::InvalidDeltaSet, "pieces overlap at " + describe(p.begin));
    }
    if (p.begin == p.end) continue;
    if (!pieces_.empty() && p.begin == pieces_.back().end) {
      pieces_.back().end = p.end;
    } else {
      pieces_.push_back(p);
    }
  }
}

bool DeltaSet::empty() const { return pieces_.empty(); }

std::vector<WindowPiece> DeltaSet::partition() const {
  std::vector<WindowPiece> out;
  for (const auto& p : pieces_) {
    const auto part = owner_.partition(p.begin, p.end);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

double delta_measure(const DeltaSet& set) {
  double total = 0.0;
  for (const auto& p : set.partition()) total += p.measure();
  return total;
}

}  // namespace chronos
