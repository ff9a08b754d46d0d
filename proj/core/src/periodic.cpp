#include "ddelab/periodic.hpp"

#include "ddelab/numerics.hpp"
#include "ddelab/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ddelab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<double> up_crossings(const Trajectory& traj, double level, double a, double b) {
  std::vector<double> out;
  for (const Crossing& c : traj.crossings(level, a, b))
    if (c.direction == CrossingDirection::Up) out.push_back(c.t);
  return out;
}

std::vector<double> uniform_mesh(int cells) {
  std::vector<double> mesh(cells + 1);
  for (int i = 0; i <= cells; ++i) mesh[i] = -1.0 + static_cast<double>(i) / cells;
  mesh.back() = 0.0;
  return mesh;
}

PeriodicOrbit make_orbit(const SystemSpec& system, const HistoryFunction& q0, double period, double level,
                         const IntegratorOptions& opt) {
  PeriodicOrbit o;
  o.system = system;
  o.q0 = q0;
  o.period = period;
  o.level = level;
  o.traj = integrate(system, q0, period, opt);
  o.min_value = o.traj.min_on(0.0, period);
  o.max_value = o.traj.max_on(0.0, period);
  o.return_residual = return_residual(o.traj, 0.0, period);
  return o;
}

}  // namespace

double PeriodicOrbit::value(double theta) const {
  double u = std::fmod(theta, period);
  if (u < 0.0) u += period;
  return traj.value(u);
}

std::vector<double> PeriodicOrbit::samples(int count) const {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = value(period * i / count);
  return out;
}

nlohmann::json PeriodicOrbit::to_json() const {
  return {{"period", period},
          {"level", level},
          {"anchor", anchor},
          {"crossings_per_period", crossings_per_period},
          {"min", min_value},
          {"max", max_value},
          {"amplitude", amplitude()},
          {"return_residual", return_residual},
          {"gap_spread", gap_spread},
          {"system", system.to_json()}};
}

double return_residual(const Trajectory& traj, double t, double omega, int samples) {
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double s = -1.0 + static_cast<double>(i) / samples;
    worst = std::max(worst, std::abs(traj.value(t + omega + s) - traj.value(t + s)));
  }
  return worst;
}

std::optional<PeriodicOrbit> detect_periodic(const Trajectory& traj, double level, double transient,
                                             const PeriodicOptions& opt) {
  if (!traj.system()) throw std::invalid_argument("detect_periodic needs a trajectory with a system");
  const double T = traj.t_end();
  const std::vector<double> ups = up_crossings(traj, level, std::max(0.0, transient), T);
  const int m = static_cast<int>(ups.size());
  if (m < 4) return std::nullopt;
  const int pmax = std::min(opt.max_crossings_per_period, (m - 1) / opt.min_periods);
  for (int p = 1; p <= pmax; ++p) {
    const int k0 = std::max(0, m - 1 - p * opt.min_periods);
    std::vector<double> periods;
    for (int k = k0; k + p <= m - 1; ++k) periods.push_back(ups[k + p] - ups[k]);
    if (periods.size() < 2) continue;
    const double omega = median(periods);
    const auto [lo, hi] = std::minmax_element(periods.begin(), periods.end());
    const double spread = (*hi - *lo) / omega;
    if (spread >= opt.gap_tol) continue;
    double best = INFINITY;
    double anchor = -1.0;
    for (int k = k0; k < m; ++k) {
      if (ups[k] < 0.0 || ups[k] + omega > T) continue;
      const double r = return_residual(traj, ups[k], omega);
      if (r < best) {
        best = r;
        anchor = ups[k];
      }
    }
    if (anchor < 0.0 || !(best < opt.residual_tol)) continue;
    double period = omega;
    int per = p;
    for (int q : {2, 3}) {
      if (per % q != 0) continue;
      if (return_residual(traj, anchor, period / q) < opt.residual_tol) {
        period /= q;
        per /= q;
      }
    }
    IntegratorOptions io;
    io.steps_per_delay = traj.steps_per_delay();
    PeriodicOrbit o = make_orbit(*traj.system(), segment_at(traj, anchor), period, level, io);
    o.anchor = anchor;
    o.crossings_per_period = per;
    o.return_residual = best;
    o.gap_spread = spread;
    return o;
  }
  return std::nullopt;
}

namespace {

template <class Phi>
double orbit_distance_impl(const PeriodicOrbit& orbit, Phi&& phi, int mesh) {
  std::vector<double> s(mesh + 1);
  std::vector<double> v(mesh + 1);
  for (int i = 0; i <= mesh; ++i) {
    s[i] = -1.0 + static_cast<double>(i) / mesh;
    v[i] = phi(s[i]);
  }
  auto dist = [&](double theta) {
    double worst = 0.0;
    for (int i = 0; i <= mesh; ++i) worst = std::max(worst, std::abs(v[i] - orbit.value(theta + s[i])));
    return worst;
  };
  const double w = orbit.period;
  const int phases = std::max(400, static_cast<int>(std::ceil(w * 400.0)));
  double best = INFINITY;
  double arg = 0.0;
  for (int k = 0; k < phases; ++k) {
    const double th = w * k / phases;
    const double dv = dist(th);
    if (dv < best) {
      best = dv;
      arg = th;
    }
  }
  const double step = w / phases;
  const double th = golden_min(dist, arg - step, arg + step, 1e-12, 100);
  return std::min(best, dist(th));
}

}  // namespace

double orbit_distance(const PeriodicOrbit& orbit, const HistoryFunction& segment, int mesh) {
  return orbit_distance_impl(orbit, [&](double s) { return segment.value(s); }, mesh);
}

double orbit_distance(const PeriodicOrbit& orbit, const Trajectory& traj, double t, int mesh) {
  return orbit_distance_impl(orbit, [&](double s) { return traj.value(t + s); }, mesh);
}

std::vector<std::vector<double>> monodromy_matrix(const SystemSpec& system, const HistoryFunction& q0,
                                                  double omega, int cells, const IntegratorOptions& opt, double eps) {
  if (cells < 20) throw std::invalid_argument("monodromy mesh must have at least 20 cells");
  if (system.kind != SystemKind::Smooth) throw std::invalid_argument("monodromy needs a smooth system");
  const std::vector<double> mesh = uniform_mesh(cells);
  std::vector<std::vector<double>> cols(cells + 1);
  parallel_for(cells + 1, [&](std::size_t i) {
    std::vector<double> e(cells + 1, 0.0);
    e[i] = 1.0;
    const HistoryFunction hat = HistoryFunction::piecewise_linear(mesh, e);
    const Trajectory up = integrate(system, q0.plus(hat, eps), omega, opt);
    const Trajectory dn = integrate(system, q0.plus(hat, -eps), omega, opt);
    std::vector<double> col(cells + 1);
    for (int j = 0; j <= cells; ++j) col[j] = (up.value(omega + mesh[j]) - dn.value(omega + mesh[j])) / (2.0 * eps);
    cols[i] = std::move(col);
  });
  return cols;
}

nlohmann::json FloquetReport::to_json() const {
  nlohmann::json mult = nlohmann::json::array();
  for (const auto& z : multipliers) mult.push_back({{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}});
  return {{"mesh", mesh},
          {"multipliers", mult},
          {"trivial_error", trivial_error},
          {"defective", defective},
          {"leading_nontrivial", leading_nontrivial},
          {"stable", stable()},
          {"has_unstable", has_unstable},
          {"lambda_u", lambda_u},
          {"psi_u_positive", psi_u_positive}};
}

FloquetReport monodromy_multipliers(const PeriodicOrbit& orbit, int cells, const IntegratorOptions& opt,
                                    int keep) {
  const auto cols = monodromy_matrix(orbit.system, orbit.q0, orbit.period, cells, opt);
  const int n = cells + 1;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(j, i) = cols[i][j];
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
  const Eigen::VectorXcd ev = es.eigenvalues();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(ev[a]) > std::abs(ev[b]); });

  FloquetReport rep;
  rep.mesh = cells;
  int trivial = order[0];
  for (int i : order)
    if (std::abs(ev[i] - 1.0) < std::abs(ev[trivial] - 1.0)) trivial = i;
  rep.trivial_error = std::abs(ev[trivial] - 1.0);
  for (int i : order) {
    if (i == trivial) continue;
    if (std::abs(ev[i] - 1.0) < 1e-3) rep.defective = true;
    rep.leading_nontrivial = std::max(rep.leading_nontrivial, std::abs(ev[i]));
    const bool real = std::abs(ev[i].imag()) <= 1e-9 * std::max(1.0, std::abs(ev[i]));
    if (real && ev[i].real() > 1.0 && ev[i].real() > rep.lambda_u) {
      rep.lambda_u = ev[i].real();
      rep.has_unstable = true;
      Eigen::VectorXd vec = es.eigenvectors().col(i).real();
      const double sum = vec.sum();
      if (sum < 0.0) vec = -vec;
      vec /= vec.cwiseAbs().maxCoeff();
      rep.psi_u.assign(vec.data(), vec.data() + n);
      rep.psi_u_positive = vec.minCoeff() > -1e-8;
    }
  }
  for (int q = 0; q < std::min(keep, n); ++q) rep.multipliers.push_back(ev[order[q]]);
  return rep;
}

nlohmann::json AttractionReport::to_json() const {
  return {{"eps", eps},         {"trials", trials},       {"passed", passed},
          {"horizon", horizon}, {"distances", distances}, {"failures", failures}};
}

AttractionReport verify_attraction(const PeriodicOrbit& orbit, double eps, int trials, const AttractionOptions& opt) {
  if (!(eps > 0.0)) throw std::invalid_argument("attraction eps must be positive");
  const SystemSpec& sys = orbit.system;
  const double upper = sys.band_upper();
  if (!(upper > 1.0 + eps)) throw std::invalid_argument("no room for starts in [1 + eps, band_upper]");
  AttractionReport rep;
  rep.eps = eps;
  rep.trials = trials;
  rep.horizon = opt.horizon > 0.0 ? opt.horizon : 100.0 + 10.0 * orbit.period;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(1.0 + eps, upper);
  std::vector<std::vector<double>> values(trials, std::vector<double>(opt.knots + 1));
  for (auto& row : values)
    for (double& v : row) v = dist(rng);
  std::vector<double> mesh(opt.knots + 1);
  for (int i = 0; i <= opt.knots; ++i) mesh[i] = -1.0 + static_cast<double>(i) / opt.knots;
  mesh.back() = 0.0;
  rep.distances.assign(trials, 0.0);
  parallel_for(trials, [&](std::size_t i) {
    Trajectory tr = integrate(sys, HistoryFunction::piecewise_linear(mesh, values[i]), rep.horizon, opt.integrator);
    rep.distances[i] = orbit_distance(orbit, tr, rep.horizon);
  });
  for (int i = 0; i < trials; ++i) {
    if (rep.distances[i] < opt.tol) {
      ++rep.passed;
    } else {
      rep.failures.push_back(i);
    }
  }
  return rep;
}

ShootingResult refine_orbit(const SystemSpec& system, const HistoryFunction& guess, double period, double level,
                            int cells, const IntegratorOptions& opt, int max_iter) {
  const std::vector<double> mesh = uniform_mesh(cells);
  const int n = cells + 1;
  std::vector<double> phi(n);
  for (int i = 0; i < n; ++i) phi[i] = guess.value(mesh[i]);
  double omega = period;

  auto residual = [&](const std::vector<double>& x, double w, Trajectory* keep) {
    Trajectory tr = integrate(system, HistoryFunction::from_samples(mesh, x), w, opt);
    Eigen::VectorXd r(n + 1);
    for (int i = 0; i < n; ++i) r[i] = tr.value(w + mesh[i]) - x[i];
    r[n] = x[n - 1] - level;
    if (keep) *keep = std::move(tr);
    return r;
  };

  ShootingResult res;
  Trajectory tr;
  Eigen::VectorXd r = residual(phi, omega, &tr);
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    if (r.cwiseAbs().maxCoeff() < 1e-11) break;
    const auto cols = monodromy_matrix(system, HistoryFunction::from_samples(mesh, phi), omega, cells, opt);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) J(j, i) = cols[i][j] - (i == j ? 1.0 : 0.0);
    for (int j = 0; j < n; ++j) J(j, n) = tr.slope(omega + mesh[j]);
    J(n, n - 1) = 1.0;
    const Eigen::VectorXd step = J.partialPivLu().solve(-r);
    const double r0 = r.cwiseAbs().maxCoeff();
    double lambda = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 6; ++bt, lambda *= 0.5) {
      std::vector<double> x = phi;
      for (int i = 0; i < n; ++i) x[i] += lambda * step[i];
      const double w = omega + lambda * step[n];
      if (!(w > 0.0)) continue;
      Trajectory cand;
      Eigen::VectorXd rc = residual(x, w, &cand);
      if (rc.cwiseAbs().maxCoeff() < r0) {
        phi = std::move(x);
        omega = w;
        r = rc;
        tr = std::move(cand);
        improved = true;
        break;
      }
    }
    res.iterations = it + 1;
    if (!improved) break;
  }
  res.residual = r.cwiseAbs().maxCoeff();
  res.converged = res.residual < 1e-9;
  res.period = omega;
  res.q0 = HistoryFunction::from_samples(mesh, phi);
  return res;
}

namespace {

enum class Side { Up, Down, Undecided };

struct SideRun {
  Side side = Side::Undecided;
  Trajectory traj;
};

// Up once a whole delay window lies above xi, Down once below.
SideRun classify_side(const SystemSpec& sys, const HistoryFunction& phi, double xi, double horizon,
                      const IntegratorOptions& opt) {
  Integrator it(sys, phi, opt);
  SideRun run;
  for (double t = 0.5; t <= horizon + 1e-12; t += 0.5) {
    it.advance_to(t);
    if (t < 1.0) continue;
    const Trajectory& tr = it.trajectory();
    if (tr.min_on(t - 1.0, t) > xi) {
      run.side = Side::Up;
      break;
    }
    if (tr.max_on(t - 1.0, t) < xi) {
      run.side = Side::Down;
      break;
    }
  }
  run.traj = it.take();
  return run;
}

struct EdgeState {
  bool ok = false;
  std::string note;
  Trajectory path;  // near-edge trajectory of the last restart
  double t_valid = 0.0;
};

EdgeState edge_track(const SystemSpec& sys, HistoryFunction phi, double xi, double lambda0, double width,
                     int restarts, const IntegratorOptions& opt) {
  const HistoryFunction chi = HistoryFunction::exponential(std::exp(-lambda0), -lambda0, 0.0);
  const double horizon = 40.0 / lambda0 + 40.0;
  EdgeState st;
  double w = width;
  for (int r = 0; r < restarts; ++r) {
    double lo = -w;
    double hi = w;
    SideRun run_lo = classify_side(sys, phi.plus(chi, lo), xi, horizon, opt);
    SideRun run_hi = classify_side(sys, phi.plus(chi, hi), xi, horizon, opt);
    for (int grow = 0; grow < 8 && (run_lo.side != Side::Down || run_hi.side != Side::Up); ++grow) {
      w *= 4.0;
      lo = -w;
      hi = w;
      run_lo = classify_side(sys, phi.plus(chi, lo), xi, horizon, opt);
      run_hi = classify_side(sys, phi.plus(chi, hi), xi, horizon, opt);
    }
    if (run_lo.side != Side::Down || run_hi.side != Side::Up) {
      st.note = "edge bracket not found along the leading eigendirection";
      return st;
    }
    for (int it = 0; it < 80 && hi - lo > 1e-10 * xi; ++it) {
      const double mid = 0.5 * (lo + hi);
      SideRun run = classify_side(sys, phi.plus(chi, mid), xi, horizon, opt);
      if (run.side == Side::Up) {
        hi = mid;
        run_hi = std::move(run);
      } else if (run.side == Side::Down) {
        lo = mid;
        run_lo = std::move(run);
      } else {
        run_lo = std::move(run);
        break;
      }
    }
    const double end = std::min(run_lo.traj.t_end(), run_hi.traj.t_end());
    double t_sep = end;
    for (double t = 0.0; t <= end; t += 0.01) {
      if (std::abs(run_lo.traj.value(t) - run_hi.traj.value(t)) > 1e-6 * xi) {
        t_sep = t;
        break;
      }
    }
    const double t_r = std::max(1.0, t_sep - 1.0);
    st.path = std::move(run_lo.traj);
    st.t_valid = std::min(t_r, st.path.t_end());
    phi = segment_at(st.path, st.t_valid);
    w = 1e-5 * xi;
  }
  st.ok = true;
  return st;
}

}  // namespace

nlohmann::json HopfCandidate::to_json() const {
  nlohmann::json j = {{"alpha", alpha},       {"found", found},         {"note", note},
                      {"a_n", data.a_n},      {"b_n", data.b_n},        {"theta_n", data.theta_n},
                      {"beta_n", data.beta_n}, {"expected_period", expected_period}, {"period", period},
                      {"amplitude", amplitude}, {"residual", residual}};
  if (orbit) j["orbit"] = orbit->to_json();
  return j;
}

nlohmann::json HopfSearchResult::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& h : table) rows.push_back(h.to_json());
  return {{"c", c}, {"d", d}, {"n", n}, {"selected", selected}, {"table", rows}};
}

HopfSearchResult hopf_orbit_search(double c, double d, double k, int n, const HopfSearchOptions& opt) {
  HopfSearchResult out;
  out.c = c;
  out.d = d;
  out.n = n;
  out.table.resize(opt.alpha_grid.size());
  parallel_for(opt.alpha_grid.size(), [&](std::size_t idx) {
    HopfCandidate cand;
    cand.alpha = opt.alpha_grid[idx];
    try {
      cand.data = hopf_data(c, d, k, n, opt.j, cand.alpha);
    } catch (const std::exception& e) {
      cand.note = e.what();
      out.table[idx] = std::move(cand);
      return;
    }
    const HopfData& hd = cand.data;
    cand.expected_period = 2.0 * kPi / hd.theta_n;
    const SystemSpec sys = SystemSpec::smooth(hd.a_n, hd.b_n, k, n);
    const double xi = hd.xi1n;
    const double lambda0 = leading_real_root(hd.a_n, sys.forcing_derivative(xi)).value;
    const double r0 = 0.2 * xi * std::sqrt(std::max(std::abs(cand.alpha), 1e-4));
    const double th = hd.theta_n;
    HistoryFunction phi = HistoryFunction::from_function(
        [&](double s) { return xi + r0 * std::cos(th * s); }, [&](double s) { return -r0 * th * std::sin(th * s); },
        200);
    EdgeState edge = edge_track(sys, phi, xi, lambda0, r0, opt.restarts, opt.integrator);
    if (!edge.ok) {
      cand.note = edge.note;
      out.table[idx] = std::move(cand);
      return;
    }
    const double t_end = edge.t_valid;
    const double amp_tail = std::max(edge.path.max_on(0.5 * t_end, t_end) - xi, xi - edge.path.min_on(0.5 * t_end, t_end));
    std::vector<double> ups = up_crossings(edge.path, xi, 1.0, t_end);
    if (amp_tail < 1e-5 * xi || ups.size() < 2) {
      cand.note = "edge trajectory settles on the stationary point";
      cand.amplitude = amp_tail;
      out.table[idx] = std::move(cand);
      return;
    }
    if (amp_tail > opt.amplitude_max) {
      cand.note = "edge trajectory leaves the small-amplitude regime";
      cand.amplitude = amp_tail;
      out.table[idx] = std::move(cand);
      return;
    }
    std::vector<double> gaps;
    for (std::size_t q = 1; q < ups.size(); ++q) gaps.push_back(ups[q] - ups[q - 1]);
    const double w_guess = median(gaps);
    const HistoryFunction guess = segment_at(edge.path, ups.back());
    ShootingResult sh = refine_orbit(sys, guess, w_guess, xi, opt.newton_cells, opt.integrator);
    cand.residual = sh.residual;
    if (!sh.converged) {
      cand.note = "shooting did not converge";
      out.table[idx] = std::move(cand);
      return;
    }
    PeriodicOrbit orb = make_orbit(sys, sh.q0, sh.period, xi, opt.integrator);
    cand.period = orb.period;
    cand.amplitude = std::max(orb.max_value - xi, xi - orb.min_value);
    cand.residual = orb.return_residual;
    if (cand.amplitude < 1e-6 * xi) {
      cand.note = "shooting collapsed onto the stationary point";
    } else if (cand.amplitude > opt.amplitude_max) {
      cand.note = "orbit amplitude above the small-amplitude cap";
    } else if (!(orb.return_residual < opt.return_tol)) {
      cand.note = "return residual above tolerance";
    } else {
      cand.found = true;
    }
    cand.orbit = std::move(orb);
    out.table[idx] = std::move(cand);
  });
  for (std::size_t i = 0; i < out.table.size(); ++i) {
    if (out.table[i].found) {
      out.selected = static_cast<int>(i);
      break;
    }
  }
  return out;
}

}  // namespace ddelab
