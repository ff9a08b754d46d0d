#include "ddelab/diagram.hpp"

#include "ddelab/parallel.hpp"
#include "ddelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddelab {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Below: return "BELOW";
    case Regime::Critical: return "CRITICAL";
    case Regime::Above: return "ABOVE";
  }
  return "CRITICAL";
}

std::string to_string(Limit l) {
  switch (l) {
    case Limit::Zero: return "ZERO";
    case Limit::Attractor: return "ATTRACTOR";
    case Limit::Periodic: return "PERIODIC";
    case Limit::Stationary: return "STATIONARY";
    case Limit::Unresolved: return "UNRESOLVED";
  }
  return "UNRESOLVED";
}

nlohmann::json BandCheck::to_json() const {
  return {{"m0_tilde", m0_tilde},       {"m1_tilde", m1_tilde},     {"sigma_tilde", sigma_tilde},
          {"delta", delta},             {"min", min_value},         {"max", max_value},
          {"in_band", in_band},         {"recurrence_gap", recurrence_gap},
          {"recurrence_ok", recurrence_ok}};
}

nlohmann::json BranchVerdict::to_json() const {
  nlohmann::json j = {{"branch", to_string(branch)},
                      {"limit", to_string(limit)},
                      {"evidence", evidence.to_json()},
                      {"landmarks", landmarks.to_json()}};
  if (band) j["band"] = band->to_json();
  if (floquet) j["floquet"] = floquet->to_json();
  if (!note.empty()) j["note"] = note;
  return j;
}

nlohmann::json HopfFate::to_json() const {
  nlohmann::json j = {{"side", side > 0 ? "plus" : "minus"},
                      {"s", s},
                      {"limit", to_string(limit)},
                      {"evidence", evidence.to_json()}};
  if (limit == Limit::Zero || limit == Limit::Stationary) j["value"] = value;
  if (orbit_distance >= 0.0) j["orbit_distance"] = orbit_distance;
  return j;
}

nlohmann::json HopfSection::to_json() const {
  nlohmann::json j = {{"present", present()}, {"search", search.to_json()}};
  if (floquet) j["floquet"] = floquet->to_json();
  if (stable_orbit) j["stable_orbit"] = stable_orbit->to_json();
  nlohmann::json fs = nlohmann::json::array();
  for (const HopfFate& f : fates) fs.push_back(f.to_json());
  j["fates"] = fs;
  if (!note.empty()) j["note"] = note;
  return j;
}

nlohmann::json ConnectionDiagram::to_json() const {
  nlohmann::json j = {{"c", c},
                      {"d", d},
                      {"k", k},
                      {"n", n},
                      {"dstar", dstar},
                      {"dstar_bracket", {dstar_lo, dstar_hi}},
                      {"regime", to_string(regime)},
                      {"minus", minus.to_json()},
                      {"plus", plus.to_json()},
                      {"consistent", consistent},
                      {"resolved", resolved()},
                      {"unresolved", unresolved}};
  if (hopf) j["hopf"] = hopf->to_json();
  return j;
}

Regime classify_regime(double d, double dstar, double rel) {
  if (d > dstar * (1.0 + rel)) return Regime::Above;
  if (d < dstar * (1.0 - rel)) return Regime::Below;
  return Regime::Critical;
}

bool regime_consistent(Regime r, Limit plus) {
  if (r == Regime::Above && plus == Limit::Zero) return false;
  if (r == Regime::Below && (plus == Limit::Attractor || plus == Limit::Periodic)) return false;
  return true;
}

BandCheck band_check(const ManifoldSolution& sol, const EnvelopeData& env, double dt) {
  BandCheck b;
  b.m0_tilde = env.m0_tilde;
  b.m1_tilde = env.m1_tilde;
  b.sigma_tilde = env.sigma_tilde;
  b.delta = env.ledger.delta;
  const double T = sol.t_max();
  b.min_value = sol.min_on(0.0, T);
  b.max_value = sol.max_on(0.0, T);
  b.in_band = b.min_value >= b.m0_tilde - 1e-6 && b.max_value <= b.m1_tilde + 1e-6;

  // Visits to [1 - delta, 1 + delta]: every crossing of 1 plus grid samples inside the strip.
  const double t2 = sol.landmarks.found ? sol.landmarks.t2 : 0.0;
  std::vector<double> visits{t2};
  for (const Crossing& cr : sol.crossings(1.0, t2, T)) visits.push_back(cr.t);
  const int steps = static_cast<int>(std::ceil((T - t2) / dt));
  for (int i = 0; i <= steps; ++i) {
    const double t = std::min(T, t2 + i * dt);
    if (std::abs(sol.value(t) - 1.0) <= b.delta) visits.push_back(t);
  }
  std::sort(visits.begin(), visits.end());
  double gap = 0.0;
  for (std::size_t i = 1; i < visits.size(); ++i) gap = std::max(gap, visits[i] - visits[i - 1]);
  // An open tail only counts once it is longer than sigma~.
  const double tail = T - visits.back();
  if (tail > b.sigma_tilde) gap = std::max(gap, tail);
  b.recurrence_gap = gap;
  b.recurrence_ok = gap <= b.sigma_tilde;
  return b;
}

namespace {

Limit limit_of(const OrbitClassification& oc, double tol) {
  switch (oc.kind) {
    case OmegaKind::ConvergesTo: return std::abs(oc.value) < tol ? Limit::Zero : Limit::Stationary;
    case OmegaKind::Periodic: return Limit::Periodic;
    case OmegaKind::BoundedUnresolved: return Limit::Unresolved;
  }
  return Limit::Unresolved;
}

BranchVerdict diagnose_branch(const ManifoldSolution& sol, const DiagramOptions& opt) {
  BranchVerdict v;
  v.branch = sol.branch;
  v.landmarks = sol.landmarks;
  v.evidence = omega_diagnose(sol.traj, opt.diagnose);
  v.limit = limit_of(v.evidence, opt.diagnose.tol);
  return v;
}

HopfFate follow_seed(const PeriodicOrbit& q, const std::vector<double>& psi, int side, double s,
                     const std::optional<PeriodicOrbit>& target, const DiagramOptions& opt) {
  HopfFate f;
  f.side = side;
  f.s = s;
  const int cells = static_cast<int>(psi.size()) - 1;
  std::vector<double> mesh(cells + 1);
  for (int i = 0; i <= cells; ++i) mesh[i] = -1.0 + static_cast<double>(i) / cells;
  mesh[cells] = 0.0;
  const HistoryFunction start = q.q0.plus(HistoryFunction::piecewise_linear(mesh, psi), side * s);
  const Trajectory tr = integrate(q.system, start, opt.hopf_horizon, opt.manifold.integrator);
  f.evidence = omega_diagnose(tr, opt.diagnose);
  f.limit = limit_of(f.evidence, opt.diagnose.tol);
  f.value = f.evidence.value;
  if (target) f.orbit_distance = orbit_distance(*target, tr, tr.t_end());
  return f;
}

void hopf_section(HopfSection& h, double c, double d, double k, int n, const DiagramOptions& opt) {
  h.search = hopf_orbit_search(c, d, k, n, opt.hopf_search);
  const HopfCandidate* cand = h.search.orbit();
  if (!cand) {
    h.note = "no small-amplitude orbit on the alpha grid";
    return;
  }
  const PeriodicOrbit& q = *cand->orbit;
  h.floquet = monodromy_multipliers(q, opt.hopf_floquet_cells, opt.manifold.integrator);
  ManifoldOptions mo = opt.manifold;
  mo.horizon = opt.hopf_horizon;
  const ManifoldSolution up = shoot_branch(q.system, Branch::Plus, mo);
  const OrbitClassification oc = omega_diagnose(up.traj, opt.diagnose);
  if (oc.orbit) h.stable_orbit = *oc.orbit;
  if (!h.floquet->has_unstable) {
    h.note = "Hopf orbit has no real multiplier above 1";
    return;
  }
  struct Job {
    int side;
    double s;
  };
  std::vector<Job> jobs;
  for (double s : opt.hopf_seeds) {
    jobs.push_back({1, s});
    jobs.push_back({-1, s});
  }
  h.fates.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    h.fates[i] = follow_seed(q, h.floquet->psi_u, jobs[i].side, jobs[i].s, h.stable_orbit, opt);
  });
}

}  // namespace

ConnectionDiagram connection_diagram(double c, double d, double k, int n, const DiagramOptions& opt) {
  if (!(c > 0.0 && d > c)) throw std::invalid_argument("diagram needs d > c > 0");
  if (n < 2) throw std::invalid_argument("diagram needs n >= 2");
  ConnectionDiagram g;
  g.c = c;
  g.d = d;
  g.k = k;
  g.n = n;
  if (opt.dstar) {
    g.dstar = g.dstar_lo = g.dstar_hi = *opt.dstar;
  } else {
    const DStarResult ds = find_dstar_auto(c, opt.dstar_tol, k, opt.threshold);
    g.dstar = ds.dstar;
    g.dstar_lo = ds.lo;
    g.dstar_hi = ds.hi;
    for (const ZClassification& z : ds.unresolved)
      g.unresolved.push_back("dstar: classification at d = " + std::to_string(z.d) + " unresolved");
  }
  g.regime = classify_regime(d, g.dstar);

  const SystemSpec sys = SystemSpec::smooth(c, d, k, n);
  ManifoldOptions mo = opt.manifold;
  mo.horizon = opt.horizon;
  const ManifoldSolution down = shoot_branch(sys, Branch::Minus, mo);
  const ManifoldSolution up = shoot_branch(sys, Branch::Plus, mo);
  g.minus = diagnose_branch(down, opt);
  g.plus = diagnose_branch(up, opt);
  if (g.minus.limit != Limit::Zero) g.minus.note = "minus branch does not tend to 0";

  if (opt.band_checks && g.regime == Regime::Above) {
    try {
      const EnvelopeData env = envelopes(c, d, 0.5 * (g.dstar + d), k, opt.threshold);
      g.plus.band = band_check(up, env);
    } catch (const std::exception& e) {
      g.plus.note = std::string("band check skipped: ") + e.what();
    }
  }
  if (g.plus.limit == Limit::Unresolved && g.plus.band && g.plus.band->in_band && g.plus.band->recurrence_ok)
    g.plus.limit = Limit::Attractor;
  if (g.plus.limit == Limit::Periodic && opt.floquet_cells > 0)
    g.plus.floquet = monodromy_multipliers(*g.plus.evidence.orbit, opt.floquet_cells, opt.manifold.integrator);

  g.consistent = regime_consistent(g.regime, g.plus.limit);
  if (g.minus.limit == Limit::Unresolved) g.unresolved.push_back("minus: omega limit unresolved");
  if (g.plus.limit == Limit::Unresolved) g.unresolved.push_back("plus: omega limit unresolved");

  if (opt.hopf) {
    g.hopf.emplace();
    hopf_section(*g.hopf, c, d, k, n, opt);
    for (const HopfFate& f : g.hopf->fates)
      if (f.limit == Limit::Unresolved)
        g.unresolved.push_back(std::string("hopf: ") + (f.side > 0 ? "plus" : "minus") + " seed fate unresolved");
  }
  return g;
}

}  // namespace ddelab
