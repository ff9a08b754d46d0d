#include "checks.hpp"

#include "ddelab/integrator.hpp"
#include "ddelab/manifold.hpp"
#include "ddelab/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace ddelab::checks {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void fail(Outcome& o, const std::string& why) {
  ++o.failures;
  o.pass = false;
  if (o.detail.size() < 400) o.detail += (o.detail.empty() ? "" : "; ") + why;
}

HistoryFunction random_linear(std::mt19937& rng, double lo, double hi, int knots = 8) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> mesh(knots + 1), values(knots + 1);
  for (int i = 0; i <= knots; ++i) {
    mesh[i] = -1.0 + static_cast<double>(i) / knots;
    values[i] = u(rng);
  }
  mesh[knots] = 0.0;
  return HistoryFunction::piecewise_linear(mesh, values);
}

struct Excursion {
  double start;
  double end;
};

// Maximal intervals after `from` where the solution is below (below = true) or above the level.
std::vector<Excursion> excursions(const ManifoldSolution& sol, double level, bool below, double from, double to) {
  std::vector<Excursion> out;
  double open = -1.0;
  for (const Crossing& cr : sol.crossings(level, from, to)) {
    const bool enters = below ? cr.direction == CrossingDirection::Down : cr.direction == CrossingDirection::Up;
    if (enters) {
      open = cr.t;
    } else if (open >= 0.0) {
      out.push_back({open, cr.t});
      open = -1.0;
    }
  }
  return out;
}

}  // namespace

Outcome monotone_ordering(int pairs, unsigned seed) {
  Outcome o{"monotone ordering"};
  const SystemSpec sys = SystemSpec::limit(1.0, 7.38);
  std::mt19937 rng(seed);
  for (int p = 0; p < pairs; ++p) {
    const HistoryFunction phi = random_linear(rng, 0.0, 0.12);
    // psi >= phi: add a nonnegative random bump.
    const HistoryFunction psi = phi.plus(random_linear(rng, 0.0, 0.05));
    const Trajectory a = integrate(sys, phi, 10.0);
    const Trajectory b = integrate(sys, psi, 10.0);
    ++o.cases;
    for (int i = 0; i <= 2000; ++i) {
      const double t = 10.0 * i / 2000.0;
      const double xa = a.value(t), xb = b.value(t);
      if (xa >= 1.0 || xb >= 1.0) break;
      if (xa > xb + 1e-9) {
        fail(o, fmt("pair %g: x_phi - x_psi = %.3e at t = %g", p, xa - xb, t));
        break;
      }
    }
  }
  return o;
}

Outcome z_ordering(double c, const std::vector<double>& d_grid) {
  Outcome o{"z ordering"};
  for (std::size_t i = 0; i + 1 < d_grid.size(); ++i) {
    const double d1 = d_grid[i], d2 = d_grid[i + 1];
    const Trajectory z1 = z_trajectory(c, d1, 2.0, 60.0);
    const Trajectory z2 = z_trajectory(c, d2, 2.0, 60.0);
    // First time z^{d2} reaches 1 after z time 1 (integration time 0).
    double omega = 59.0;
    for (const Crossing& cr : z2.crossings(1.0, 0.0, 59.0)) {
      omega = cr.t;
      break;
    }
    const int N = z1.steps_per_delay();
    ++o.cases;
    for (long k = 1; k < static_cast<long>(omega * N); ++k) {
      const double t = static_cast<double>(k) / N;
      if (z1.value(t) >= z2.value(t) + 1e-9) {
        fail(o, fmt("d = %g vs %g fails at z time %g", d1, d2, t + 1.0));
        break;
      }
    }
  }
  return o;
}

Outcome seed_robustness(double c, double d) {
  Outcome o{"seed robustness"};
  const SystemSpec sys = SystemSpec::limit(c, d);
  ManifoldOptions a;
  a.horizon = 12.0;
  const ManifoldSolution u = shoot_branch(sys, Branch::Plus, a);
  ManifoldOptions b = a;
  b.eps_seed = 0.5 * u.eps_seed;
  const ManifoldSolution v = shoot_branch(sys, Branch::Plus, b);
  const double dist = sup_distance(u, v, 0.0, 10.0);
  ++o.cases;
  if (!(dist < 1e-6)) fail(o, fmt("sup distance %.3e on [0, 10]", dist));
  o.detail = o.pass ? fmt("sup distance %.3e", dist) : o.detail;
  return o;
}

Outcome band_membership(double c, double d, int n) {
  Outcome o{"band membership"};
  const DStarResult ds = find_dstar_auto(c);
  const EnvelopeData env = envelopes(c, d, 0.5 * (ds.dstar + d));
  ManifoldOptions mo;
  mo.horizon = 100.0;
  const ManifoldSolution x = shoot_branch(SystemSpec::limit(c, d), Branch::Plus, mo);
  const ManifoldSolution y = shoot_branch(SystemSpec::smooth(c, d, 2.0, n), Branch::Plus, mo);
  const double xmin = x.min_on(0.0, x.t_max()), xmax = x.max_on(0.0, x.t_max());
  const double ymin = y.min_on(0.0, y.t_max()), ymax = y.max_on(0.0, y.t_max());
  o.cases = 2;
  if (xmin < env.m0 - 1e-9 || xmax > env.m1 + 1e-9)
    fail(o, fmt("x+ range [%g, %g] leaves [m0, m1]", xmin, xmax));
  if (ymin < env.m0_tilde - 1e-6 || ymax > env.m1_tilde + 1e-6)
    fail(o, fmt("y+ range [%g, %g] leaves [m0~, m1~]", ymin, ymax));
  if (o.pass)
    o.detail = fmt("x+ in [%.4f, %.4f], m0 = %.4f", xmin, xmax, env.m0) + fmt(", y+ in [%.4f, %.4f]", ymin, ymax);
  return o;
}

Outcome interval_exit(double c, double d, int n) {
  Outcome o{"interval exit"};
  const DStarResult ds = find_dstar_auto(c);
  const EnvelopeData env = envelopes(c, d, 0.5 * (ds.dstar + d));
  const double delta = env.ledger.delta;
  ManifoldOptions mo;
  mo.horizon = 100.0;
  const ManifoldSolution y = shoot_branch(SystemSpec::smooth(c, d, 2.0, n), Branch::Plus, mo);
  const double t2 = y.landmarks.t2, T = y.t_max();
  for (const Excursion& e : excursions(y, 1.0 - delta, true, t2, T)) {
    ++o.cases;
    if (e.end - e.start > env.tau0) fail(o, fmt("below 1-delta for %g > tau0 at t = %g", e.end - e.start, e.start));
    if (y.min_on(e.start, e.end) < 0.5 * env.m0) fail(o, fmt("min %g below m0/2 at t = %g", y.min_on(e.start, e.end), e.start));
  }
  for (const Excursion& e : excursions(y, 1.0 + delta, false, t2, T)) {
    ++o.cases;
    if (e.end - e.start > env.nu1) fail(o, fmt("above 1+delta for %g > nu1 at t = %g", e.end - e.start, e.start));
    if (y.max_on(e.start, e.end) > 2.0 * d / c) fail(o, fmt("max %g above 2d/c at t = %g", y.max_on(e.start, e.end), e.start));
  }
  // Gap filling for the limit solution: sub-unity excursions after t2 last at most tau0 and dominate w0.
  const ManifoldSolution x = shoot_branch(SystemSpec::limit(c, d), Branch::Plus, mo);
  for (const Excursion& e : excursions(x, 1.0, true, x.landmarks.t2 + 1e-9, x.t_max())) {
    ++o.cases;
    const double len = e.end - e.start;
    if (len > env.tau0 + 1e-9) fail(o, fmt("x+ below 1 for %g > tau0 at t = %g", len, e.start));
    for (int i = 0; i <= 200; ++i) {
      const double s = len * i / 200.0;
      if (x.value(e.start + s) < env.w0_at(s) - 1e-9) {
        fail(o, fmt("x+ below w0 at offset %g after t = %g", s, e.start));
        break;
      }
    }
  }
  if (o.cases == 0) fail(o, "no excursions found");
  if (o.pass) o.detail = fmt("%g excursions, tau0 = %.4f, delta = %.3e", o.cases, env.tau0, delta);
  return o;
}

Outcome step_halving() {
  Outcome o{"step halving"};
  const SystemSpec sys = SystemSpec::smooth(1.0, 7.38, 2.0, 6);
  const HistoryFunction h = HistoryFunction::from_function([](double s) { return 0.5 + 0.3 * std::sin(3.0 * s); },
                                                           [](double s) { return 0.9 * std::cos(3.0 * s); }, 400);
  IntegratorOptions opt;
  opt.refine = false;
  opt.steps_per_delay = 1600;
  const double ref = integrate(sys, h, 5.0, opt).value(5.0);
  double prev = 0.0;
  std::string rates;
  for (int N : {20, 40, 80, 160}) {
    opt.steps_per_delay = N;
    const double err = std::abs(integrate(sys, h, 5.0, opt).value(5.0) - ref);
    if (prev > 0.0) {
      const double ratio = prev / err;
      ++o.cases;
      rates += fmt(rates.empty() ? "%.2f" : " %.2f", ratio);
      if (!(ratio > 12.0 && ratio < 20.0)) fail(o, fmt("halving ratio %.2f at N = %g", ratio, N));
    }
    prev = err;
  }
  if (o.pass) o.detail = "ratios " + rates;
  return o;
}

std::vector<Outcome> property_suite() {
  return {monotone_ordering(),
          z_ordering(1.0, {1.2, 1.5, 1.75, 2.0, 3.0}),
          seed_robustness(1.0, 7.38),
          band_membership(1.0, 7.38, 200),
          interval_exit(1.0, 7.38, 200),
          step_halving()};
}

}  // namespace ddelab::checks
