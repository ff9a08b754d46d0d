#include "ddelab/threshold.hpp"

#include "ddelab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddelab {

std::string to_string(ZVerdict v) {
  switch (v) {
    case ZVerdict::InD: return "IN_D";
    case ZVerdict::HitsOne: return "HITS_ONE";
    case ZVerdict::Unresolved: return "UNRESOLVED";
  }
  return "UNRESOLVED";
}

nlohmann::json ZClassification::to_json() const {
  return {{"c", c},        {"d", d},           {"verdict", to_string(verdict)}, {"horizon", horizon},
          {"evidence", evidence}, {"max_value", max_value}, {"min_value", min_value}};
}

namespace {

HistoryFunction z_history(double c) { return HistoryFunction::exponential(1.0, c, 0.0); }

double certificate_level(double c, double d, double k) {
  if (!(k > 1.0)) throw std::invalid_argument("threshold machinery needs k > 1");
  return std::pow(c / d, 1.0 / (k - 1.0));
}

}  // namespace

Trajectory z_trajectory(double c, double d, double k, double t_end, const IntegratorOptions& opt) {
  return integrate(SystemSpec::limit(c, d, k), z_history(c), std::max(0.0, t_end - 1.0), opt);
}

ZClassification classify_zd(double c, double d, double k, const ThresholdOptions& opt) {
  if (!(c > 0.0) || !(d >= c)) throw std::invalid_argument("classify_zd needs d >= c > 0");
  ZClassification out;
  out.c = c;
  out.d = d;
  out.horizon = opt.t_max;
  const bool certify = d > c;
  const double xi1 = certificate_level(c, d, k);
  Integrator it(SystemSpec::limit(c, d, k), z_history(c), opt.integrator);
  const double t_stop = opt.t_max - 1.0;
  std::size_t processed = it.trajectory().function().size();
  // Latest integration time with z >= xi1; on the history z = e^{-c(s+1)}.
  double last_above = std::min(0.0, -1.0 + std::log(1.0 / xi1) / c);
  double zmax = -INFINITY;
  double zmin = INFINITY;
  while (it.time() < t_stop) {
    it.advance_to(std::min(t_stop, it.time() + 5.0));
    const Trajectory& tr = it.trajectory();
    const auto& pieces = tr.function().pieces();
    for (; processed < pieces.size(); ++processed) {
      const Piece& p = pieces[processed];
      const double hi = tr.max_on(p.t0, p.t1);
      const double lo = tr.min_on(p.t0, p.t1);
      if (hi >= 1.0) {
        double tau = p.t1;
        for (const Crossing& cr : tr.crossings(1.0, p.t0, p.t1)) {
          if (cr.direction == CrossingDirection::Up) {
            tau = cr.t;
            break;
          }
        }
        out.verdict = ZVerdict::HitsOne;
        out.evidence = tau + 1.0;
        out.max_value = std::max(zmax, 1.0);
        out.min_value = std::min(zmin, lo);
        return out;
      }
      zmax = std::max(zmax, hi);
      zmin = std::min(zmin, lo);
      if (p.value(p.t1) >= xi1) {
        last_above = p.t1;
      } else if (hi >= xi1) {
        for (const Crossing& cr : tr.crossings(xi1, p.t0, p.t1)) last_above = std::max(last_above, cr.t);
      }
      if (certify && p.t1 - last_above >= 1.0) {
        out.verdict = ZVerdict::InD;
        out.evidence = p.t1 + 1.0;
        out.max_value = zmax;
        out.min_value = zmin;
        return out;
      }
    }
  }
  out.verdict = ZVerdict::Unresolved;
  out.evidence = it.time() + 1.0;
  out.max_value = zmax;
  out.min_value = zmin;
  return out;
}

nlohmann::json DStarResult::to_json() const {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& b : history) hist.push_back({b.lo, b.hi});
  nlohmann::json unres = nlohmann::json::array();
  for (const auto& u : unresolved) unres.push_back(u.to_json());
  return {{"c", c}, {"dstar", dstar}, {"bracket", {lo, hi}}, {"history", hist}, {"unresolved", unres}};
}

DStarResult find_dstar(double c, double d_lo, double d_hi, double tol, double k, const ThresholdOptions& opt) {
  if (!(tol >= 1e-6)) throw std::invalid_argument("find_dstar tolerance must be >= 1e-6");
  if (!(d_lo < d_hi)) throw std::invalid_argument("initial bracket invalid: need d_lo < d_hi");
  if (classify_zd(c, d_lo, k, opt).verdict != ZVerdict::InD)
    throw std::invalid_argument("initial bracket invalid: d_lo is not classified IN_D");
  if (classify_zd(c, d_hi, k, opt).verdict != ZVerdict::HitsOne)
    throw std::invalid_argument("initial bracket invalid: d_hi is not classified HITS_ONE");
  DStarResult res;
  res.c = c;
  double lo = d_lo;
  double hi = d_hi;
  res.history.push_back({lo, hi});
  auto resolve = [&](double d) {
    ThresholdOptions o = opt;
    ZClassification z = classify_zd(c, d, k, o);
    for (int i = 0; i < opt.max_doublings && z.verdict == ZVerdict::Unresolved; ++i) {
      o.t_max *= 2.0;
      z = classify_zd(c, d, k, o);
    }
    return z;
  };
  while (hi - lo >= tol * lo) {
    const double mid = 0.5 * (lo + hi);
    ZClassification z = resolve(mid);
    if (z.verdict == ZVerdict::InD) {
      lo = mid;
    } else if (z.verdict == ZVerdict::HitsOne) {
      hi = mid;
    } else {
      res.unresolved.push_back(z);
      // Probe both sides of the unresolved midpoint; advance whichever resolves.
      const double q_lo = lo + 0.25 * (hi - lo);
      const double q_hi = hi - 0.25 * (hi - lo);
      ZClassification zl = resolve(q_lo);
      ZClassification zh = resolve(q_hi);
      bool moved = false;
      if (zl.verdict == ZVerdict::InD) {
        lo = q_lo;
        moved = true;
      } else if (zl.verdict == ZVerdict::Unresolved) {
        res.unresolved.push_back(zl);
      }
      if (zh.verdict == ZVerdict::HitsOne) {
        hi = q_hi;
        moved = true;
      } else if (zh.verdict == ZVerdict::Unresolved) {
        res.unresolved.push_back(zh);
      }
      if (!moved) break;
    }
    res.history.push_back({lo, hi});
  }
  res.lo = lo;
  res.hi = hi;
  res.dstar = 0.5 * (lo + hi);
  return res;
}

DStarResult find_dstar_auto(double c, double tol, double k, const ThresholdOptions& opt) {
  double lo = 1.05 * c;
  for (int i = 0; i < 30 && classify_zd(c, lo, k, opt).verdict != ZVerdict::InD; ++i) lo = c + 0.5 * (lo - c);
  double hi = 2.0 * c;
  for (int i = 0; i < 12 && classify_zd(c, hi, k, opt).verdict != ZVerdict::HitsOne; ++i) {
    lo = std::max(lo, hi);
    hi *= 2.0;
  }
  // The doubling may have moved lo onto an unresolved value; re-check.
  if (classify_zd(c, lo, k, opt).verdict != ZVerdict::InD) lo = 1.05 * c;
  return find_dstar(c, lo, hi, tol, k, opt);
}

double tau1_closed_form(double c, double d1) {
  return 1.0 + std::log(d1 / c * (1.0 - std::exp(-c)) + std::exp(-c)) / c;
}

double EnvelopeData::w1_at(double t) const {
  const double r = d1 / c;
  if (t <= 1.0) return r + (1.0 - r) * std::exp(-c * t);
  return (r * (1.0 - std::exp(-c)) + std::exp(-c)) * std::exp(-c * (t - 1.0));
}

nlohmann::json DeltaLedger::to_json() const {
  return {{"k1", k1},         {"k2", k2},         {"Delta", Delta},   {"bound1", bound1},
          {"bound2", bound2}, {"bound3", bound3}, {"bound4", bound4}, {"delta", delta}};
}

nlohmann::json EnvelopeData::to_json() const {
  return {{"c", c},
          {"d", d},
          {"d0", d0},
          {"d1", d1},
          {"k", k},
          {"tau0", tau0},
          {"tau1", tau1},
          {"xi1", xi1},
          {"m0", m0},
          {"m1", m1},
          {"sigma", sigma},
          {"nu1", nu1},
          {"m0_tilde", m0_tilde},
          {"m1_tilde", m1_tilde},
          {"sigma_tilde", sigma_tilde},
          {"ledger", ledger.to_json()}};
}

EnvelopeData envelopes(double c, double d, double d0, double k, const ThresholdOptions& opt) {
  return envelopes(c, d, d0, d, k, opt);
}

EnvelopeData envelopes(double c, double d, double d0, double d1, double k, const ThresholdOptions& opt) {
  if (!(d > d0 && d0 > c && c > 0.0)) throw std::invalid_argument("envelopes need d > d0 > c > 0");
  EnvelopeData env;
  env.c = c;
  env.d = d;
  env.d0 = d0;
  env.d1 = d1;
  env.k = k;
  const Feedback g = Feedback::power_cutoff(k);

  Integrator it(SystemSpec::limit(c, d0, k), z_history(c), opt.integrator);
  double tau = -1.0;
  while (tau < 0.0 && it.time() < opt.t_max) {
    it.advance_to(it.time() + 5.0);
    for (const Event& e : it.trajectory().events()) {
      if (e.kind == EventKind::LevelUp && e.t > 0.0) {
        tau = e.t;
        break;
      }
    }
  }
  if (tau < 0.0) throw std::invalid_argument("w0 never returns to 1: d0 must exceed d*");
  env.w0 = it.take();
  env.tau0 = tau + 1.0;
  env.xi1 = certificate_level(c, d, k);
  env.m0 = std::min(env.xi1, env.w0.min_on(-1.0, tau));
  env.m1 = d / c;
  env.tau1 = tau1_closed_form(c, d1);
  env.sigma = std::max(env.tau0, env.tau1);

  DeltaLedger& L = env.ledger;
  double gprime = 0.0;
  for (int i = 0; i <= 10000; ++i) gprime = std::max(gprime, g.derivative(i / 10000.0));
  L.k1 = 4.0 + 2.0 * d * gprime;
  for (int i = 9999; i >= 1; --i) {
    const double D = i / 10000.0;
    if (c * D < 0.5 * g.value(std::exp(-c * D))) {
      L.Delta = D;
      break;
    }
  }
  if (!(L.Delta > 0.0)) throw std::invalid_argument("no admissible Delta on the search grid");
  L.k2 = 2.0 + L.Delta * L.k1;
  const double dd = d - d0;
  L.bound1 = dd * g.value(0.5 * env.m0) / L.k1;
  L.bound2 = dd * g.value(std::exp(-c * L.Delta)) / (2.0 * L.k1);
  const double integral =
      integrate_adaptive([&](double s) { return std::exp(c * s) * g.value(std::exp(-c * (s - 1.0))); }, 1.0,
                         1.0 + L.Delta, 1e-14)
          .value;
  L.bound3 = dd / L.k2 * std::exp(-c * (1.0 + L.Delta)) * integral;
  L.bound4 = std::min({d / c - 1.0, 0.5 * c, 0.25 * env.m0});
  const double dmin = std::min({L.bound1, L.bound2, L.bound3, L.bound4});
  if (!(dmin > 0.0)) throw std::invalid_argument("no admissible delta; shrink d - d0");
  L.delta = 0.5 * dmin;
  env.nu1 = 1.0 + 2.0 / (c * L.delta) * (2.0 * d / c - 1.0);
  env.m0_tilde = 0.5 * env.m0;
  env.m1_tilde = 2.0 * d / c;
  env.sigma_tilde = std::max(env.tau0, env.nu1);
  return env;
}

bool LedgerReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const LedgerItem& i) { return i.pass; });
}

bool LedgerReport::pass_5_to_9() const {
  return std::all_of(items.begin(), items.end(), [](const LedgerItem& i) { return i.index < 5 || i.pass; });
}

nlohmann::json LedgerReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& i : items)
    arr.push_back({{"item", i.index}, {"pass", i.pass}, {"lhs", i.lhs}, {"rhs", i.rhs}, {"what", i.what}});
  return {{"n", n}, {"a_n", a_n}, {"b_n", b_n}, {"delta", delta}, {"items", arr}, {"all_pass", all_pass()}};
}

LedgerReport check_n_ledger(const EnvelopeData& env, const Feedback& f, double a_n, double b_n) {
  LedgerReport rep;
  rep.n = f.n();
  rep.a_n = a_n;
  rep.b_n = b_n;
  const double delta = env.ledger.delta;
  rep.delta = delta;
  const double c = env.c;
  const double d = env.d;
  const Feedback g = Feedback::power_cutoff(env.k);
  auto add = [&](int idx, double lhs, double rhs, const char* what) {
    rep.items.push_back({idx, lhs < rhs, lhs, rhs, what});
  };
  add(1, delta, env.ledger.bound1, "delta < (d-d0) g(m0/2)/k1");
  add(2, delta, env.ledger.bound2, "delta < (d-d0) g(e^{-c Delta})/(2 k1)");
  add(3, delta, env.ledger.bound3, "delta < (d-d0)/k2 e^{-c(1+Delta)} int e^{cs} g(e^{-c(s-1)}) ds");
  add(4, delta, env.ledger.bound4, "1+delta < d/c, delta < c/2, delta < m0/4");
  add(5, std::max({std::abs(a_n - c), std::abs(b_n - d), d * std::abs(a_n - c)}), delta,
      "|a_n-c|, |b_n-d|, d|a_n-c| < delta");

  constexpr int kGrid = 10000;
  constexpr double kTail = 100.0;
  double tail = f.value(1.0 + delta);
  for (int i = 0; i <= kGrid; ++i) tail = std::max(tail, f.value(1.0 + delta + (kTail - 1.0 - delta) * i / kGrid));
  if (f.kind() == FeedbackKind::Hill) tail = std::max(tail, std::pow(kTail, f.k() - f.n()));
  add(6, b_n * tail, delta, "b_n sup_{[1+delta,inf)} f < delta");

  double close = std::abs(f.value(1.0 - delta) - g.value(1.0 - delta));
  for (int i = 0; i <= kGrid; ++i) {
    double x = (1.0 - delta) * i / kGrid;
    close = std::max(close, std::abs(f.value(x) - g.value(x)));
  }
  add(7, d * close, delta, "d sup_{[0,1-delta]} |f - g| < delta");
  const double ratio = b_n / a_n;
  rep.items.push_back({8, 1.0 + delta < ratio && ratio < 2.0 * d / c, ratio, 2.0 * d / c, "1+delta < b_n/a_n < 2d/c"});
  add(9, 0.5 * c, a_n, "a_n > c/2");
  return rep;
}

LedgerReport check_n_ledger(const EnvelopeData& env, int n) {
  return check_n_ledger(env, Feedback::hill(env.k, n), env.c, env.d);
}

int smallest_ledger_n(const EnvelopeData& env, const std::vector<int>& n_grid) {
  for (int n : n_grid)
    if (check_n_ledger(env, n).all_pass()) return n;
  return -1;
}

}  // namespace ddelab
