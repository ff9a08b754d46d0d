#include "ddelab/manifold.hpp"

#include "ddelab/parallel.hpp"
#include "ddelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ddelab {

std::string to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

nlohmann::json Landmarks::to_json() const {
  return {{"found", found}, {"t1", t1}, {"t2", t2}, {"t3", t3}, {"eps", eps}, {"x_t1p1", x_t1p1},
          {"eps_shrunk", eps_shrunk}};
}

std::vector<Crossing> ManifoldSolution::crossings(double level, double a, double b) const {
  auto raw = traj.crossings(level, a + shift, b + shift);
  for (auto& c : raw) c.t -= shift;
  return raw;
}

double ManifoldSolution::min_increment(double a, double b, int samples) const {
  double worst = INFINITY;
  double prev = value(a);
  for (int i = 1; i <= samples; ++i) {
    double t = a + (b - a) * i / samples;
    double v = value(t);
    worst = std::min(worst, v - prev);
    prev = v;
  }
  return worst;
}

std::string ManifoldSolution::to_csv(double dt) const {
  std::string out = "t,x,x_delayed\n";
  char buf[96];
  const double lo = std::max(t_min() + 1.0, -t_back);
  const long i0 = static_cast<long>(std::ceil(lo / dt));
  const long i1 = static_cast<long>(std::floor(t_max() / dt + 1e-9));
  for (long i = i0; i <= i1; ++i) {
    double t = i * dt;
    std::snprintf(buf, sizeof buf, "%.10f,%.12f,%.12f\n", t, value(t), value(t - 1.0));
    out += buf;
  }
  return out;
}

ManifoldSolution shoot_branch(const SystemSpec& system, Branch branch, const ManifoldOptions& opt) {
  ManifoldSolution sol;
  sol.branch = branch;
  sol.system = system;
  sol.xi_star = unstable_point(system);
  const double xi = sol.xi_star;
  sol.lambda0 = leading_real_root(system.decay, system.forcing_derivative(xi)).value;
  if (!(sol.lambda0 > 0.0)) throw std::runtime_error("stationary point is not unstable");
  const bool plus = branch == Branch::Plus;
  sol.kappa = opt.kappa.value_or(plus ? 0.5 * (1.0 - xi) : -0.5 * xi);
  if (plus && !(sol.kappa > 0.0 && sol.kappa < 1.0 - xi))
    throw std::invalid_argument("plus-branch kappa must lie in (0, 1 - xi)");
  if (!plus && !(sol.kappa < 0.0 && sol.kappa > -xi))
    throw std::invalid_argument("minus-branch kappa must lie in (-xi, 0)");
  sol.eps_seed = opt.eps_seed.value_or(std::min(1e-4, std::abs(sol.kappa) * std::exp(-15.0)));
  if (!(sol.eps_seed > 0.0 && sol.eps_seed <= 1e-4)) throw std::invalid_argument("eps_seed must lie in (0, 1e-4]");

  // xi + sign * eps * e^{lambda0 s} on [-1, 0], exactly representable.
  const double sign = plus ? 1.0 : -1.0;
  HistoryFunction seed =
      HistoryFunction::exponential(sign * sol.eps_seed * std::exp(-sol.lambda0), -sol.lambda0, xi);
  Integrator it(system, seed, opt.integrator);

  const double target = xi + sol.kappa;
  const double wrong = xi - sol.kappa;
  const double limit_time = 60.0 / sol.lambda0 + 60.0;
  double found = -1.0;
  double scanned = 0.0;
  while (found < 0.0) {
    if (it.time() >= limit_time)
      throw std::runtime_error("normalising crossing not reached; kappa out of range or horizon too short");
    it.advance_to(it.time() + 5.0);
    const Trajectory& tr = it.trajectory();
    for (const Crossing& c : tr.crossings(target, scanned, tr.t_end())) {
      if ((plus && c.direction == CrossingDirection::Up) || (!plus && c.direction == CrossingDirection::Down)) {
        found = c.t;
        break;
      }
    }
    if (found < 0.0) {
      for (const Crossing& c : tr.crossings(wrong, scanned, tr.t_end())) {
        (void)c;
        throw std::runtime_error("seed escaped toward the wrong side of the stationary point");
      }
    }
    scanned = tr.t_end();
  }
  sol.shift = found;
  it.advance_to(found + opt.horizon);
  sol.traj = it.take();
  sol.t_back = std::min(15.0 / sol.lambda0, sol.shift);
  sol.landmarks = compute_landmarks(sol);
  return sol;
}

Landmarks compute_landmarks(const ManifoldSolution& sol) {
  Landmarks lm;
  if (sol.branch != Branch::Plus) return lm;
  const double T = sol.t_max();
  double t1 = -1.0;
  double t2 = -1.0;
  for (const Crossing& c : sol.crossings(1.0, 0.0, T)) {
    if (t1 < 0.0 && c.direction == CrossingDirection::Up) {
      t1 = c.t;
    } else if (t1 >= 0.0 && c.direction == CrossingDirection::Down && c.t > t1 + 1.0) {
      t2 = c.t;
      break;
    }
  }
  if (t1 < 0.0 || t2 < 0.0 || t1 + 1.0 > T) return lm;
  lm.t1 = t1;
  lm.t2 = t2;
  lm.x_t1p1 = sol.value(t1 + 1.0);
  double eps = 0.25 * (sol.max_on(t1, t2) - 1.0);
  for (int attempt = 0; attempt < 40; ++attempt) {
    const double lvl = 1.0 + 2.0 * eps;
    double sa = -1.0;
    double sb = -1.0;
    for (const Crossing& c : sol.crossings(lvl, t1, t2)) {
      if (sa < 0.0 && c.direction == CrossingDirection::Up) {
        sa = c.t;
      } else if (sa >= 0.0 && c.direction == CrossingDirection::Down) {
        sb = c.t;
        break;
      }
    }
    if (sa >= 0.0 && sb > sa + 1.0) {
      const double hi = std::min(sb - 1.0, t2 - 1.0);
      if (hi > sa) {
        lm.t3 = 0.5 * (sa + hi);
        lm.eps = eps;
        lm.found = true;
        return lm;
      }
    }
    eps *= 0.5;
    lm.eps_shrunk = true;
  }
  return lm;
}

double exp_segment_check(const ManifoldSolution& sol, int samples) {
  const Landmarks& lm = sol.landmarks;
  if (!lm.found) throw std::runtime_error("landmarks missing");
  const double c = sol.system.decay;
  const double a = lm.t1 + 1.0;
  const double b = std::min(lm.t2 + 1.0, sol.t_max());
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double t = a + (b - a) * i / samples;
    worst = std::max(worst, std::abs(sol.value(t) - lm.x_t1p1 * std::exp(-c * (t - a))));
  }
  return worst;
}

double sup_distance(const ManifoldSolution& u, const ManifoldSolution& v, double a, double b, double dt) {
  const long steps = std::max(1L, static_cast<long>(std::ceil((b - a) / dt)));
  double worst = 0.0;
  for (long i = 0; i <= steps; ++i) {
    double t = a + (b - a) * static_cast<double>(i) / steps;
    worst = std::max(worst, std::abs(u.value(t) - v.value(t)));
  }
  return worst;
}

ConvergenceTable convergence_table(double c, double d, double k, const std::vector<int>& n_grid, int m,
                                   const ManifoldOptions& opt) {
  ConvergenceTable tab;
  tab.c = c;
  tab.d = d;
  tab.k = k;
  const SystemSpec lim = SystemSpec::limit(c, d, k);
  ManifoldOptions lopt = opt;
  ManifoldSolution x = shoot_branch(lim, Branch::Plus, lopt);
  tab.limit_landmarks = x.landmarks;
  if (!x.landmarks.found) throw std::runtime_error("limit plus branch has no landmarks");
  if (m <= 0) m = static_cast<int>(std::ceil(x.landmarks.t2)) + 1;
  if (!(m > x.landmarks.t2)) throw std::invalid_argument("m must exceed t2");
  tab.m = m;
  if (x.t_max() < m) {
    lopt.horizon = m + 2.0;
    x = shoot_branch(lim, Branch::Plus, lopt);
  }
  ManifoldOptions nopt = opt;
  nopt.kappa = x.kappa;
  nopt.horizon = std::max<double>(opt.horizon, m + 2.0);
  tab.rows.resize(n_grid.size());
  parallel_for(n_grid.size(), [&](std::size_t i) {
    ConvergenceRow row;
    row.n = n_grid[i];
    try {
      const SystemSpec sm = SystemSpec::smooth(c, d, k, row.n);
      ManifoldSolution y = shoot_branch(sm, Branch::Plus, nopt);
      row.available = true;
      row.xi1n = y.xi_star;
      row.sup_distance = sup_distance(y, x, 0.0, m);
      row.segment_distance0 = sup_distance(y, x, -1.0, 0.0, 1e-3);
      row.value_gap0 = std::abs(y.value(0.0) - x.value(0.0));
      const Landmarks& lm = x.landmarks;
      row.window_min = y.min_on(lm.t3, lm.t3 + 1.0);
    } catch (const std::exception&) {
      row.available = false;
    }
    tab.rows[i] = row;
  });
  std::vector<std::size_t> avail;
  for (std::size_t i = 0; i < tab.rows.size(); ++i)
    if (tab.rows[i].available) avail.push_back(i);
  if (!avail.empty()) {
    std::size_t knee = avail.back();
    for (std::size_t q = avail.size() - 1; q > 0; --q) {
      if (tab.rows[avail[q]].sup_distance <= tab.rows[avail[q - 1]].sup_distance) {
        knee = avail[q - 1];
      } else {
        break;
      }
    }
    tab.knee = static_cast<int>(knee);
    tab.super_threshold_ok = tab.rows[avail.back()].window_min >= 1.0 + x.landmarks.eps;
  }
  return tab;
}

nlohmann::json ConvergenceTable::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"n", r.n},
                         {"available", r.available},
                         {"xi1n", r.xi1n},
                         {"sup_distance", r.sup_distance},
                         {"segment_distance0", r.segment_distance0},
                         {"value_gap0", r.value_gap0},
                         {"window_min", r.window_min}});
  return {{"c", c}, {"d", d}, {"k", k}, {"m", m}, {"landmarks", limit_landmarks.to_json()},
          {"rows", rows_json}, {"knee", knee}, {"super_threshold_ok", super_threshold_ok}};
}

}  // namespace ddelab
