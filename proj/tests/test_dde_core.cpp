#include <doctest.h>

#include "ddelab/diagnose.hpp"
#include "ddelab/integrator.hpp"
#include "ddelab/numerics.hpp"
#include "ddelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace ddelab;

namespace {

double one_step_closed_form(double c, double d, double t) { return std::exp(-c * t) * (1.0 - d / c) + d / c; }

}  // namespace

TEST_SUITE("dde-core") {

TEST_CASE("unit history one-step formula") {
  const Trajectory tr = integrate(SystemSpec::limit(1.0, 7.38), HistoryFunction::constant(1.0), 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double t = i / 10000.0;
    worst = std::max(worst, std::abs(tr.value(t) - one_step_closed_form(1.0, 7.38, t)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("stationary history stays put") {
  const SystemSpec sys = SystemSpec::smooth(1.0, 7.38, 2.0, 100);
  const double xi = unstable_point(sys);
  const Trajectory tr = integrate(sys, HistoryFunction::constant(xi), 5.0);
  double worst = 0.0;
  for (int i = 0; i <= 500; ++i) worst = std::max(worst, std::abs(tr.value(i * 0.01) - xi));
  CHECK(worst < 1e-10);
}

TEST_CASE("super-threshold history decays exponentially") {
  const Trajectory tr = integrate(SystemSpec::limit(1.0, 7.38), HistoryFunction::constant(1.5), 1.0);
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    CHECK(tr.value(t) == doctest::Approx(1.5 * std::exp(-t)).epsilon(1e-12));
  }
}

TEST_CASE("segment_at") {
  const HistoryFunction h = HistoryFunction::exponential(1.0, 1.0, 0.0);
  const Trajectory tr = integrate(SystemSpec::limit(1.0, 7.38), h, 3.0);
  const HistoryFunction s0 = segment_at(tr, 0.0);
  CHECK(s0.sup_distance(h) < 1e-12);

  const Trajectory flat = integrate(SystemSpec::limit(1.0, 7.38), HistoryFunction::constant(0.0), 3.0);
  const HistoryFunction s2 = segment_at(flat, 2.5);
  CHECK(s2.max() == 0.0);
  CHECK(s2.min() == 0.0);

  const Trajectory one = integrate(SystemSpec::limit(1.0, 7.38), HistoryFunction::constant(1.0), 2.0);
  const HistoryFunction s1 = segment_at(one, 1.0);
  const int N = one.steps_per_delay();
  double worst = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double s = -1.0 + static_cast<double>(i) / N;
    worst = std::max(worst, std::abs(s1.value(s) - one_step_closed_form(1.0, 7.38, 1.0 + s)));
  }
  CHECK(worst < 1e-8);
  CHECK_THROWS_AS(segment_at(one, 2.5), std::out_of_range);
}

TEST_CASE("bounds reports") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 7.38);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> mesh, vals;
    for (int i = 0; i <= 6; ++i) {
      mesh.push_back(-1.0 + i / 6.0);
      vals.push_back(u(rng));
    }
    mesh.back() = 0.0;
    const Trajectory tr = integrate(SystemSpec::limit(1.0, 7.38), HistoryFunction::piecewise_linear(mesh, vals), 30.0);
    const BoundsReport r = check_bounds(tr);
    CHECK(r.start_in_band);
    CHECK(r.max_value <= 7.38 + 1e-9);
    CHECK(r.in_band);
    CHECK(r.lipschitz_ok);
  }
  const Trajectory sm = integrate(SystemSpec::smooth(1.0, 7.38, 2.0, 100), HistoryFunction::constant(10.0), 30.0);
  const BoundsReport rs = check_bounds(sm);
  CHECK(rs.lipschitz <= 8.0 * 7.38);
  CHECK(rs.in_band);
  const Trajectory zero = integrate(SystemSpec::limit(1.0, 7.38), HistoryFunction::constant(0.0), 10.0);
  const BoundsReport rz = check_bounds(zero);
  CHECK(rz.max_value == 0.0);
  CHECK(rz.min_value == 0.0);
}

TEST_CASE("omega diagnosis") {
  // Below the unstable point the limit solution collapses to 0.
  const SystemSpec lim = SystemSpec::limit(1.0, 7.38);
  const OrbitClassification z = omega_diagnose(integrate(lim, HistoryFunction::constant(0.1), 80.0));
  CHECK(z.kind == OmegaKind::ConvergesTo);
  CHECK(std::abs(z.value) < 1e-6);

  const SystemSpec sm = SystemSpec::smooth(1.0, 7.38, 2.0, 100);
  const double xi = unstable_point(sm);
  DiagnoseOptions shortwin;
  shortwin.window = 5.0;
  const OrbitClassification s = omega_diagnose(integrate(sm, HistoryFunction::constant(xi), 15.0), shortwin);
  CHECK(s.kind == OmegaKind::ConvergesTo);
  CHECK(s.value == doctest::Approx(xi).epsilon(1e-6));

  const OrbitClassification p = omega_diagnose(integrate(sm, HistoryFunction::constant(0.5), 200.0));
  REQUIRE(p.kind == OmegaKind::Periodic);
  REQUIRE(p.orbit);
  CHECK(p.orbit->period > 0.0);

  CHECK_THROWS(omega_diagnose(integrate(sm, HistoryFunction::constant(0.5), 10.0)));
}

TEST_CASE("integral equation residual") {
  const SystemSpec sys = SystemSpec::limit(1.0, 7.38);
  const Trajectory tr = integrate(sys, HistoryFunction::constant(0.4), 20.0);
  std::vector<double> breaks;
  for (const Crossing& cr : tr.crossings(1.0, -1.0, 19.0)) breaks.push_back(cr.t + 1.0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    double tau = u(rng), t = u(rng);
    if (tau > t) std::swap(tau, t);
    std::vector<double> cuts{tau};
    for (double b : breaks)
      if (b > tau && b < t) cuts.push_back(b);
    cuts.push_back(t);
    double integral = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const double mid = 0.5 * (cuts[j] + cuts[j + 1]);
      const int br = sys.feedback.branch(tr.value(mid - 1.0));
      integral += integrate_adaptive(
                      [&](double s) {
                        return std::exp(-(t - s)) * sys.feedback.value_on_branch(tr.value(s - 1.0), br);
                      },
                      cuts[j], cuts[j + 1], 1e-13)
                      .value;
    }
    const double res = tr.value(t) - std::exp(-(t - tau)) * tr.value(tau) - 7.38 * integral;
    worst = std::max(worst, std::abs(res));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("event split exactness") {
  const Trajectory tr = integrate(SystemSpec::limit(1.0, 7.38), HistoryFunction::constant(0.4), 20.0);
  double open = -1.0;
  int intervals = 0;
  double worst = 0.0;
  for (const Crossing& cr : tr.crossings(1.0, -1.0, 19.0)) {
    if (cr.direction == CrossingDirection::Up) {
      open = cr.t;
      continue;
    }
    if (open < 0.0) continue;
    const double a = open + 1.0, b = cr.t + 1.0;
    const double xa = tr.value(a);
    for (int i = 0; i <= 200; ++i) {
      const double t = a + (b - a) * i / 200.0;
      const double ref = xa * std::exp(-(t - a));
      worst = std::max(worst, std::abs(tr.value(t) - ref) / ref);
    }
    ++intervals;
    open = -1.0;
  }
  CHECK(intervals > 2);
  CHECK(worst < 1e-10);
}

TEST_CASE("continuity at joins") {
  const Trajectory tr = integrate(SystemSpec::smooth(1.0, 7.38, 2.0, 20), HistoryFunction::constant(0.5), 10.0);
  const auto& pieces = tr.function().pieces();
  double worst = 0.0;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    const double left = pieces[i - 1].value(pieces[i - 1].t1);
    const double right = pieces[i].value(pieces[i].t0);
    worst = std::max(worst, std::abs(left - right) / std::max(1.0, std::abs(left)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("csv export and determinism") {
  const SystemSpec sys = SystemSpec::limit(1.0, 7.38);
  const Trajectory a = integrate(sys, HistoryFunction::constant(0.4), 5.0);
  const Trajectory b = integrate(sys, HistoryFunction::constant(0.4), 5.0);
  const std::string csv = a.to_csv(10);
  CHECK(csv.rfind("t,x,x_delayed,derivative_flag\n", 0) == 0);
  CHECK(csv == b.to_csv(10));
  CHECK(a.events_json().dump() == b.events_json().dump());
  CHECK(a.events_json().is_array());
}

TEST_CASE("input validation") {
  const SystemSpec sys = SystemSpec::limit(1.0, 7.38);
  CHECK_THROWS_AS(integrate(sys, HistoryFunction::constant(-0.5), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sys, HistoryFunction::constant(0.5), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(SystemSpec::limit(-1.0, 2.0), std::invalid_argument);
  CHECK_FALSE(SystemSpec::limit(2.0, 1.0).regime_warnings().empty());
  CHECK(SystemSpec::limit(1.0, 7.38).regime_warnings().empty());
}

}
