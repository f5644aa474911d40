#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "chronos/error.hpp"
#include "chronos/system.hpp"
#include "chronos/tsexp.hpp"
#include "support.hpp"

using namespace chronos;
using namespace chronos::testing;

namespace {

double max_abs(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected chronos::Error");
  return ErrorKind::ParseError;
}

/// Forward solution by walking the scale with sigma; dense stretches with constant
/// input use Eigen's exponential of the augmented matrix [[A, f], [0, 0]].
Vec oracle_endpoint(const LinearSystem& sys, const Vec& x0, const ControlSignal& u, double t_end) {
  const auto& ts = sys.scale();
  const Mat& A = sys.A();
  const Index n = sys.states();
  std::vector<double> switches;
  for (const auto& s : u.segments()) switches.push_back(s.t);
  Vec x = x0;
  double cur = u.t0();
  while (cur < t_end) {
    const Vec f = sys.B() * u.value_at(cur);
    const double next = ts.sigma(cur);
    if (next > cur) {
      x = x + (next - cur) * (A * x + f);
      cur = next;
      continue;
    }
    double stop = t_end;
    for (const auto& c : ts.components())
      if (c.lo <= cur && cur < c.hi) stop = std::min(stop, c.hi);
    for (double s : switches)
      if (s > cur && s < stop) stop = s;
    Mat aug = Mat::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = A;
    aug.topRightCorner(n, 1) = f;
    Vec z(n + 1);
    z << x, 1.0;
    x = ((aug * (stop - cur)).exp() * z).head(n);
    cur = stop;
  }
  return x;
}

}  // namespace

TEST_CASE("system construction is validated") {
  const auto ts = TimeScale::integers(0, 2);
  CHECK(kind_of([&] { LinearSystem(ts, Mat::Zero(2, 3), Mat::Zero(2, 1)); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { LinearSystem(ts, Mat::Zero(2, 2), Mat::Zero(3, 1)); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { LinearSystem(ts, Mat::Zero(3, 3), Mat::Zero(3, 1)); }) == ErrorKind::WindowTooSmall);
  CHECK_NOTHROW(LinearSystem(ts, Mat::Zero(2, 2), Mat::Zero(2, 1)));
}

TEST_CASE("positivity matrix by scale") {
  const Mat A = mat({{-5, 2}, {0, -1}});
  const Mat B = mat({{1}, {0}});
  const auto real = positivity_matrix(LinearSystem(TimeScale::real_line(0, 1), A, B));
  CHECK(real.is_infinite(0, 0));
  CHECK(real.is_infinite(1, 1));
  CHECK(real(0, 1) == 2.0);
  CHECK(real(1, 0) == 0.0);

  const auto ints = positivity_matrix(LinearSystem(TimeScale::integers(0, 4), A, B));
  CHECK(ints.entries() == mat({{-4, 2}, {0, 0}}));

  const auto q = positivity_matrix(LinearSystem(TimeScale::q_grid(2.0, 1.0, 5), A, B));
  CHECK(q.entries() == A);
}

TEST_CASE("is_positive") {
  CHECK(is_positive(LinearSystem(TimeScale::real_line(0, 1), mat({{-5, 2}, {0, -1}}), mat({{1}, {0}}))).positive);
  CHECK(is_positive(integer_two_input()).positive);

  const auto neg = is_positive(LinearSystem(TimeScale::integers(0, 3), mat({{-2, 0}, {0, 0}}), mat({{1}, {0}})));
  CHECK_FALSE(neg.positive);
  REQUIRE(neg.failure.has_value());
  CHECK(neg.failure->source == PositivityReport::Source::a_t);
  CHECK(neg.failure->row == 0);
  CHECK(neg.failure->value == -1.0);
  CHECK(neg.describe() == "A_T(1,1) = -1 < 0");

  const auto badb = is_positive(LinearSystem(TimeScale::integers(0, 3), Mat::Zero(2, 2), mat({{1}, {-0.5}})));
  CHECK_FALSE(badb.positive);
  CHECK(badb.failure->source == PositivityReport::Source::b);

  // Metzler on the real line, not Metzler on q grids.
  const Mat metzler = mat({{-3, 1}, {1, -3}});
  CHECK(is_positive(LinearSystem(TimeScale::real_line(0, 1), metzler, mat({{1}, {1}}))).positive);
  CHECK_FALSE(is_positive(LinearSystem(TimeScale::q_grid(2, 1, 4), metzler, mat({{1}, {1}}))).positive);
}

TEST_CASE("exponential nonnegativity witness") {
  CHECK_FALSE(exp_nonneg_witness(integer_two_input(), 0, 2).has_value());

  const auto shear = LinearSystem(TimeScale::real_line(0, 1), mat({{0, -1}, {0, 0}}), mat({{1}, {0}}));
  const auto w = exp_nonneg_witness(shear, 0, 1);
  REQUIRE(w.has_value());
  CHECK(w->row == 0);
  CHECK(w->col == 1);
  CHECK(w->value == doctest::Approx(-(w->t - w->t0)));

  const auto jump = LinearSystem(TimeScale::integers(0, 3), mat({{-2, 0}, {0, 0}}), mat({{1}, {0}}));
  const auto wj = exp_nonneg_witness(jump, 0, 3);
  REQUIRE(wj.has_value());
  CHECK(wj->t0 == 0.0);
  CHECK(wj->t == 1.0);
  CHECK(wj->row == 0);
  CHECK(wj->col == 0);
  CHECK(wj->value == -1.0);

  // q grid: A_T = A, so a negative diagonal fails once mu exceeds 1/|a_ii|.
  const auto qsys = LinearSystem(TimeScale::q_grid(2.0, 1.0, 3), mat({{-1e-3, 0}, {0, 0}}), mat({{1}, {0}}));
  CHECK_FALSE(is_positive(qsys).positive);
  CHECK(exp_nonneg_witness(qsys, 1, 4).has_value());
}

TEST_CASE("simulation worked examples") {
  const auto sys = integer_two_input();
  const ControlSignal first(sys.scale(), 0, 2, {{0, vec({1, 0})}, {1, vec({0, 0})}});
  CHECK(simulate(sys, Vec::Zero(2), first, 2).final_state() == vec({0, 1}));
  const ControlSignal second(sys.scale(), 0, 2, {{0, vec({0, 0})}, {1, vec({1, 0})}});
  CHECK(simulate(sys, Vec::Zero(2), second, 2).final_state() == vec({1, 0}));

  const auto mixed = mixed_scale_system();
  const Vec x0 = vec({0.7, -0.2});
  const auto traj = simulate(mixed, x0, ControlSignal::zero(mixed.scale(), 0, 3, 1), 3);
  const Vec expected = ts_exp(mixed.A(), mixed.scale(), 3, 0) * x0;
  CHECK(max_abs(traj.final_state() - expected) < 1e-14);
  // Atom endpoints and dense samples are all reported.
  CHECK(traj.t.front() == 0.0);
  CHECK(traj.t.back() == 3.0);
  CHECK(std::is_sorted(traj.t.begin(), traj.t.end()));
  CHECK(traj.t.size() == 1 + 1 + 32 + 1);
}

TEST_CASE("control signals are validated") {
  const auto ts = mixed_scale();
  CHECK(kind_of([&] { ControlSignal(ts, 0, 3, {{1, vec({1})}}); }) == ErrorKind::DomainMismatch);
  CHECK(kind_of([&] { ControlSignal(ts, 0, 3, {{0, vec({1})}, {0, vec({2})}}); }) == ErrorKind::DomainMismatch);
  CHECK(kind_of([&] { ControlSignal(ts, 0, 3, {{0, vec({1})}, {3, vec({2})}}); }) == ErrorKind::DomainMismatch);
  CHECK(kind_of([&] { ControlSignal(ts, 0, 3, {{0, vec({-1})}}, true); }) == ErrorKind::DomainMismatch);
  CHECK(kind_of([&] { ControlSignal(ts, 0, 3, {{0, vec({1})}, {0.5, vec({1})}}); }) == ErrorKind::PointNotInScale);
  CHECK(kind_of([&] { ControlSignal(ts, 3, 3, {{3, vec({1})}}); }) == ErrorKind::EmptyWindow);

  const ControlSignal u(ts, 0, 3, {{0, vec({1})}, {1.5, vec({2})}});
  CHECK(u.value_at(1.49)(0) == 1.0);
  CHECK(u.value_at(1.5)(0) == 2.0);

  const auto sys = mixed_scale_system();
  CHECK(kind_of([&] { simulate(sys, Vec::Zero(3), u, 3); }) == ErrorKind::DomainMismatch);
  CHECK(kind_of([&] { simulate(sys, vec({NAN, 0}), u, 3); }) == ErrorKind::NonFiniteState);
  CHECK(kind_of([&] { simulate(sys, Vec::Zero(2), ControlSignal(ts, 1, 2, {{1, vec({1})}}), 3); }) ==
        ErrorKind::DomainMismatch);
}

TEST_CASE("property: simulation agrees with a sigma-walk oracle") {
  std::mt19937_64 rng(31);
  const std::vector<TimeScale> scales = {mixed_scale(), TimeScale::custom({{0, 0.5}, {1, 1}, {1.5, 2.5}, {3, 3}}),
                                         TimeScale::real_line(0, 2), TimeScale::points({0, 0.5, 1.5, 2, 4})};
  for (int trial = 0; trial < 60; ++trial) {
    const auto& ts = scales[static_cast<std::size_t>(trial) % scales.size()];
    const Index n = 1 + trial % 3;
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Mat A(n, n), B(n, 2);
    for (Index i = 0; i < A.size(); ++i) A(i) = d(rng);
    for (Index i = 0; i < B.size(); ++i) B(i) = d(rng);
    const LinearSystem sys(ts, A, B);
    const ControlSignal u = random_nonneg_control(sys, ts.min(), ts.max(), 5, static_cast<std::uint64_t>(trial));
    Vec x0(n);
    for (Index i = 0; i < n; ++i) x0(i) = d(rng);
    const Vec got = simulate(sys, x0, u, ts.max()).final_state();
    const Vec oracle = oracle_endpoint(sys, x0, u, ts.max());
    CHECK(max_abs(got - oracle) <= 1e-10 * std::max(1.0, max_abs(oracle)));
  }
}

TEST_CASE("property: superposition and discrete recursion") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    const auto ts = trial % 2 ? random_scattered(rng, 5) : mixed_scale();
    const Index n = 2 + trial % 3;
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Mat A(n, n), B(n, 1);
    for (Index i = 0; i < A.size(); ++i) A(i) = d(rng);
    for (Index i = 0; i < B.size(); ++i) B(i) = d(rng);
    if (!ts.has_at_least(static_cast<std::size_t>(n) + 1)) continue;
    const LinearSystem sys(ts, A, B);
    const double t0 = ts.min(), t1 = ts.max();
    const ControlSignal u = random_nonneg_control(sys, t0, t1, 8, static_cast<std::uint64_t>(trial));
    Vec x0(n);
    for (Index i = 0; i < n; ++i) x0(i) = d(rng);

    const Vec full = simulate(sys, x0, u, t1).final_state();
    const Vec free = simulate(sys, x0, ControlSignal::zero(ts, t0, t1, 1), t1).final_state();
    const Vec forced = simulate(sys, Vec::Zero(n), u, t1).final_state();
    CHECK(max_abs(full - free - forced) <= 1e-9 * std::max(1.0, max_abs(full)));

    if (trial % 2) {
      Vec x = x0;
      for (const auto& p : ts.scattered_points(t0, t1))
        x = (Mat::Identity(n, n) + p.mu * A) * x + p.mu * B * u.value_at(p.t);
      CHECK(max_abs(full - x) <= 1e-12 * std::max(1.0, max_abs(x)));
    }
  }
}

TEST_CASE("property: positive invariance") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const bool dense = trial % 2 == 0;
    const auto ts = dense ? mixed_scale() : random_scattered(rng, 5);
    const Index n = 2;
    const double mu_bar = ts.max_graininess();
    const LinearSystem sys(ts, positive_drift(rng, n, mu_bar, 0.5), sparse_nonneg(rng, n, 2, 0.6));
    REQUIRE(is_positive(sys).positive);
    Vec x0(n);
    for (Index i = 0; i < n; ++i) x0(i) = grid_value(rng, 0.0, 2.0);
    const auto u = random_nonneg_control(sys, ts.min(), ts.max(), 3, static_cast<std::uint64_t>(trial));
    for (const auto& x : simulate(sys, x0, u, ts.max()).x) CHECK(x.minCoeff() >= -1e-9);
  }
}

TEST_CASE("reachable-set sampling") {
  const auto sys = integer_two_input();
  const auto pts = sample_positive_reachable(sys, 0, 2, 40, 12345);
  REQUIRE(pts.size() == 40);
  CHECK(pts[0] == Vec::Zero(2));
  for (const auto& p : pts) CHECK(p.minCoeff() >= 0.0);
  CHECK(sample_positive_reachable(sys, 0, 2, 40, 12345) == pts);
  CHECK(sample_positive_reachable(sys, 0, 2, 40, 999) != pts);

  const auto nonpos = LinearSystem(TimeScale::integers(0, 3), mat({{-2, 0}, {0, 0}}), mat({{1}, {0}}));
  CHECK(kind_of([&] { sample_positive_reachable(nonpos, 0, 3, 4, 1); }) == ErrorKind::NotPositiveSystem);
}

TEST_CASE("property: reachable set grows as the window start moves back") {
  const std::vector<LinearSystem> systems = {integer_two_input(), mixed_scale_system(), nonhomogeneous_system(),
                                             LinearSystem(TimeScale::real_line(0, 2), mat({{-1, 0}, {1, -1}}),
                                                          mat({{1}, {0}}))};
  const std::vector<std::pair<double, double>> windows = {{1, 0}, {1.5, 0}, {2, 1}, {0.75, 0.25}};
  for (std::size_t s = 0; s < systems.size(); ++s) {
    const auto& sys = systems[s];
    const auto [t0, tau0] = windows[s];
    const double t1 = sys.scale().max();
    const auto pts = sample_positive_reachable(sys, t0, t1, 20, 77);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const auto u = random_nonneg_control(sys, t0, t1, 77, i);
      std::vector<ControlSegment> padded{{tau0, Vec::Zero(sys.inputs())}};
      for (const auto& seg : u.segments()) padded.push_back(seg);
      const ControlSignal longer(sys.scale(), tau0, t1, padded, true);
      CHECK(simulate(sys, Vec::Zero(sys.states()), longer, t1).final_state() == pts[i]);
    }
  }
}
