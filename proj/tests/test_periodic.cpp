#include <doctest.h>

#include "ddelab/diagnose.hpp"
#include "ddelab/diagram.hpp"
#include "ddelab/periodic.hpp"
#include "ddelab/spectrum.hpp"

#include <cmath>

using namespace ddelab;

namespace {

PeriodicOrbit x1_orbit(int N = 200, int n = 100) {
  IntegratorOptions opt;
  opt.steps_per_delay = N;
  const Trajectory tr = integrate(SystemSpec::smooth(1.0, 7.38, 2.0, n), HistoryFunction::constant(0.5), 200.0, opt);
  auto orbit = detect_periodic(tr, 1.0, 100.0);
  REQUIRE(orbit);
  return *orbit;
}

}  // namespace

TEST_SUITE("periodic") {

TEST_CASE("constant trajectory has no orbit") {
  const SystemSpec sys = SystemSpec::smooth(1.0, 7.38, 2.0, 100);
  const Trajectory tr = integrate(sys, HistoryFunction::constant(unstable_point(sys)), 60.0);
  CHECK_FALSE(detect_periodic(tr, 1.0, 10.0));
}

TEST_CASE("x1 orbit and mesh stability") {
  const PeriodicOrbit a = x1_orbit(200);
  CHECK(a.period > 1.0);
  CHECK(a.return_residual < 1e-6);
  CHECK(std::abs(a.value(0.0) - 1.0) < 1e-9);
  const PeriodicOrbit b = x1_orbit(400);
  CHECK(std::abs(b.period - a.period) / a.period < 1e-4);
}

TEST_CASE("orbit distance") {
  const PeriodicOrbit p = x1_orbit();
  CHECK(orbit_distance(p, p.q0) < 1e-9);
  CHECK(orbit_distance(p, HistoryFunction::constant(0.0)) > 0.5);
}

TEST_CASE("monodromy of the x1 orbit") {
  const PeriodicOrbit p = x1_orbit(200, 200);
  const FloquetReport f = monodromy_multipliers(p, 100);
  CHECK(f.trivial_error < 2e-3);
  CHECK(f.stable());
  CHECK_FALSE(f.has_unstable);
  CHECK_THROWS_AS(monodromy_multipliers(p, 10), std::invalid_argument);
  CHECK_THROWS_AS(monodromy_matrix(SystemSpec::limit(1.0, 7.38), p.q0, p.period, 50), std::invalid_argument);
}

TEST_CASE("attraction of the x1 orbit") {
  const PeriodicOrbit p = x1_orbit(200, 200);
  const double eps = 0.1;
  const Trajectory tr = integrate(p.system, HistoryFunction::constant(1.0 + eps), 200.0);
  CHECK(orbit_distance(p, tr, 200.0) < 1e-3);
  const AttractionReport r = verify_attraction(p, eps, 3);
  CHECK(r.passed == 3);
}

TEST_CASE("attraction of the x2 orbit") {
  const Trajectory tr = integrate(SystemSpec::smooth(4.0, 12.71, 2.0, 200), HistoryFunction::constant(0.5), 300.0);
  const OrbitClassification oc = omega_diagnose(tr);
  REQUIRE(oc.kind == OmegaKind::Periodic);
  const AttractionReport r = verify_attraction(*oc.orbit, 0.1, 20);
  CHECK(r.passed == 20);
  CHECK(r.failures.empty());
}

TEST_CASE("Hopf orbit search") {
  const double c = prototype_hopf_c(1);
  HopfSearchOptions opt;
  opt.alpha_grid = {0.2, 0.1, 0.05, -0.1};
  const HopfSearchResult r = hopf_orbit_search(c, 25.0, 2.0, 200, opt);
  REQUIRE(r.orbit());
  const HopfCandidate& h = *r.orbit();
  CHECK(std::abs(h.period - h.expected_period) / h.expected_period < 0.2);
  CHECK(h.amplitude < 0.2);
  std::vector<double> amps;
  for (const HopfCandidate& cand : r.table)
    if (cand.found && cand.alpha > 0.0) amps.push_back(cand.amplitude);
  REQUIRE(amps.size() == 3);
  CHECK(amps[0] > amps[1]);
  CHECK(amps[1] > amps[2]);
  CHECK_FALSE(r.table.back().found);
}

TEST_CASE("diagram regimes") {
  CHECK(classify_regime(2.0, 1.0) == Regime::Above);
  CHECK(classify_regime(1.0005, 1.0) == Regime::Critical);
  CHECK(classify_regime(0.5, 1.0) == Regime::Below);
  CHECK_FALSE(regime_consistent(Regime::Above, Limit::Zero));
  CHECK_FALSE(regime_consistent(Regime::Below, Limit::Periodic));
  CHECK_FALSE(regime_consistent(Regime::Below, Limit::Attractor));
  CHECK(regime_consistent(Regime::Below, Limit::Zero));
}

TEST_CASE("diagram below the threshold") {
  DiagramOptions opt;
  opt.horizon = 200.0;
  const ConnectionDiagram g = connection_diagram(1.0, 1.5, 2.0, 200, opt);
  CHECK(g.regime == Regime::Below);
  CHECK(g.minus.limit == Limit::Zero);
  CHECK(g.plus.limit == Limit::Zero);
  CHECK(g.consistent);
}

TEST_CASE("diagram for x1 with recurrence") {
  DiagramOptions opt;
  opt.floquet_cells = 0;
  const ConnectionDiagram g = connection_diagram(1.0, 7.38, 2.0, 200, opt);
  CHECK(g.regime == Regime::Above);
  CHECK(g.minus.limit == Limit::Zero);
  CHECK(g.plus.limit == Limit::Periodic);
  REQUIRE(g.plus.band);
  CHECK(g.plus.band->in_band);
  CHECK(g.plus.band->recurrence_ok);
  CHECK(g.consistent);
  CHECK(g.resolved());
  const nlohmann::json j = g.to_json();
  CHECK(j["plus"]["limit"] == "PERIODIC");
  CHECK(j["minus"]["limit"] == "ZERO");
}

}
