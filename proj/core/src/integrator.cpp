#include "ddelab/integrator.hpp"

#include "ddelab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ddelab {

namespace {

constexpr double kTimeEps = 1e-12;
constexpr double kGrazeTol = 1e-10;

template <class F>
double gk_adaptive(const F& f, double a, double b, double tol, int depth) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double k = 0.0;
  double g = 0.0;
  for (int i = 0; i < 15; ++i) {
    double v = f(c + h * gk::nodes[i]);
    k += gk::kronrod_weights[i] * v;
    g += gk::gauss_weights[i] * v;
  }
  if (std::abs(k - g) * h <= tol || depth <= 0) return k * h;
  return gk_adaptive(f, a, c, 0.5 * tol, depth - 1) + gk_adaptive(f, c, b, 0.5 * tol, depth - 1);
}

}  // namespace

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::LevelUp: return "level-up";
    case EventKind::LevelDown: return "level-down";
    case EventKind::ForcingBreak: return "forcing-break";
    case EventKind::Graze: return "graze";
  }
  return "unknown";
}

double Trajectory::value(double t) const {
  if (t < -1.0 - kTimeEps || t > t_end() + kTimeEps)
    throw std::out_of_range("trajectory evaluated outside [-1, T]");
  return fn_.value(t);
}

std::vector<double> Trajectory::derivative_breaks() const {
  std::vector<double> out;
  for (const Event& e : events_)
    if (e.kind == EventKind::ForcingBreak) out.push_back(e.t);
  return out;
}

nlohmann::json Trajectory::events_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Event& e : events_) arr.push_back({{"t", e.t}, {"kind", to_string(e.kind)}});
  return arr;
}

std::string Trajectory::to_csv(int stride) const {
  if (stride < 1) stride = 1;
  struct Row {
    double t;
    int flag;
  };
  std::vector<Row> rows;
  const double T = t_end();
  for (long i = 0;; i += stride) {
    double t = static_cast<double>(i) / steps_;
    if (t > T + kTimeEps) break;
    rows.push_back({std::min(t, T), 0});
  }
  if (rows.empty() || rows.back().t < T - kTimeEps) rows.push_back({T, 0});
  for (double b : derivative_breaks())
    if (b >= 0.0 && b <= T) rows.push_back({b, 1});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.t < y.t; });
  std::string out = "t,x,x_delayed,derivative_flag\n";
  char buf[128];
  for (const Row& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", r.t, value(r.t), value(r.t - 1.0), r.flag);
    out += buf;
  }
  return out;
}

Integrator::Integrator(const SystemSpec& system, const HistoryFunction& history, IntegratorOptions opt)
    : decay_(system.decay), forcing_(std::make_shared<SystemForcing>(system)), opt_(opt) {
  system.validate();
  if (history.min() < -1e-12) throw std::invalid_argument("history must be nonnegative");
  traj_.system_ = system;
  init(history);
}

Integrator::Integrator(double decay, std::shared_ptr<const DelayForcing> forcing,
                       const HistoryFunction& history, IntegratorOptions opt)
    : decay_(decay), forcing_(std::move(forcing)), opt_(opt) {
  if (!(decay > 0.0)) throw std::invalid_argument("decay must be positive");
  init(history);
}

void Integrator::init(const HistoryFunction& history) {
  if (opt_.steps_per_delay < 1) throw std::invalid_argument("steps per delay must be positive");
  const double h = 1.0 / opt_.steps_per_delay;
  traj_.fn_ = PiecewiseFunction(-1.0, h);
  traj_.history_ = history;
  traj_.decay_ = decay_;
  traj_.steps_ = opt_.steps_per_delay;
  for (const Piece& p : history.pieces()) {
    traj_.fn_.append(p);
    after_piece(p);
  }
}

double Integrator::forcing_at(double s, int branch) const {
  return forcing_->value(s, traj_.fn_.value(s - 1.0), branch);
}

double Integrator::forced_part(double alpha, double beta, int branch) const {
  const auto& pieces = traj_.fn_.pieces();
  const double a = decay_;
  double total = 0.0;
  double t = alpha;
  std::size_t i = traj_.fn_.locate(alpha - 1.0);
  while (t < beta && i < pieces.size()) {
    const Piece& q = pieces[i];
    const double end = std::min(beta, q.t1 + 1.0);
    if (end > t) {
      auto integrand = [&](double s) {
        return std::exp(-a * (end - s)) * forcing_->value(s, q.value(s - 1.0), branch);
      };
      double width = end - t;
      double coarse = 0.0;
      {
        double c = 0.5 * (t + end);
        double hw = 0.5 * width;
        coarse = std::abs(integrand(c)) * width + std::abs(integrand(t + 0.1 * hw)) * width;
      }
      double tol = opt_.quad_tol * std::max(width, coarse);
      total = total * std::exp(-a * (end - t)) + gk_adaptive(integrand, t, end, tol, 24);
      t = end;
    }
    ++i;
  }
  if (t < beta) throw IntegrationError("delayed lookup ran past the stored solution", beta);
  return total;
}

void Integrator::advance_piece(double alpha, double beta, double u_alpha, int depth,
                               const double* known_end, int branch) {
  const double a = decay_;
  if (branch < 0) {
    branch = forcing_->discontinuous() ? forcing_->branch(traj_.fn_.value(0.5 * (alpha + beta) - 1.0)) : 0;
  }
  const double p_end = known_end ? *known_end : forced_part(alpha, beta, branch);
  const double f_a = forcing_at(alpha, branch);
  const double f_b = forcing_at(beta, branch);
  Piece p = Piece::hermite(alpha, beta, 0.0, f_a, p_end, f_b - a * p_end);
  if (opt_.refine && depth < opt_.max_refine_depth) {
    const double mid = 0.5 * (alpha + beta);
    const double p_mid = forced_part(alpha, mid, branch);
    const double x = mid - alpha;
    const double herm = ((p.poly[3] * x + p.poly[2]) * x + p.poly[1]) * x;
    const double scale = std::max({1.0, std::abs(u_alpha), std::abs(p_end)});
    if (std::abs(herm - p_mid) > opt_.dense_tol * scale) {
      advance_piece(alpha, mid, u_alpha, depth + 1, &p_mid, branch);
      const double u_mid = u_alpha * std::exp(-a * (mid - alpha)) + p_mid;
      const double rest = p_end - std::exp(-a * (beta - mid)) * p_mid;
      advance_piece(mid, beta, u_mid, depth + 1, &rest, branch);
      return;
    }
  }
  p.rate = a;
  p.expo = u_alpha;
  const double u_beta = p.value(beta);
  if (!std::isfinite(u_beta) || std::abs(u_beta) > 1e150) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "non-finite or overflowing state at t=%.17g", beta);
    throw IntegrationError(buf, beta);
  }
  traj_.fn_.append(p);
  after_piece(p);
}

void Integrator::after_piece(const Piece& p) {
  std::vector<Crossing> found;
  scan_piece_crossings(p, opt_.level, level_sign_, level_last_t_, found);
  for (const Crossing& c : found)
    traj_.events_.push_back({c.t, c.direction == CrossingDirection::Up ? EventKind::LevelUp : EventKind::LevelDown});
  if (!forcing_->discontinuous()) return;
  const double lvl = forcing_->switch_level();
  std::vector<Crossing> sw;
  if (lvl == opt_.level) {
    sw = found;
  } else {
    scan_piece_crossings(p, lvl, switch_sign_, switch_last_t_, sw);
  }
  for (const Crossing& c : sw) breaks_.push({c.t + 1.0, 0});
  if (sw.empty()) {
    double closest = std::abs(p.value(0.5 * (p.t0 + p.t1)) - lvl);
    closest = std::min({closest, std::abs(p.value(p.t0) - lvl), std::abs(p.value(p.t1) - lvl)});
    if (closest < kGrazeTol && closest > 0.0) {
      bool dup = !traj_.events_.empty() && traj_.events_.back().kind == EventKind::Graze &&
                 p.t0 - traj_.events_.back().t < 1.0 / opt_.steps_per_delay + kTimeEps;
      if (!dup) traj_.events_.push_back({p.t0, EventKind::Graze});
    }
  }
}

void Integrator::step(double ta, double tb) {
  std::vector<double> splits;
  while (!breaks_.empty() && breaks_.top().t < tb - kTimeEps) {
    Break b = breaks_.top();
    breaks_.pop();
    if (b.t > ta + kTimeEps) splits.push_back(b.t);
    if (b.order == 0) {
      breaks_.push({b.t + 1.0, 1});
      traj_.events_.push_back({b.t, EventKind::ForcingBreak});
    }
  }
  std::sort(splits.begin(), splits.end());
  double alpha = ta;
  double u = traj_.fn_.pieces().back().value(ta);
  splits.push_back(tb);
  for (double beta : splits) {
    if (beta - alpha <= kTimeEps) continue;
    advance_piece(alpha, beta, u, 0, nullptr, -1);
    u = traj_.fn_.pieces().back().value(beta);
    alpha = beta;
  }
}

void Integrator::advance_to(double t_end) {
  const int n = opt_.steps_per_delay;
  const std::size_t first_new_event = traj_.events_.size();
  while (t_ < t_end - kTimeEps) {
    const double grid_next = static_cast<double>(step_index_ + 1) / n;
    double tb = std::min(grid_next, t_end);
    if (grid_next - tb <= kTimeEps) tb = grid_next;
    step(t_, tb);
    t_ = tb;
    if (tb == grid_next) ++step_index_;
  }
  // Breaks are logged when consumed, crossings when found; restore time order.
  std::stable_sort(traj_.events_.begin() + static_cast<long>(first_new_event), traj_.events_.end(),
                   [](const Event& x, const Event& y) { return x.t < y.t; });
}

Trajectory integrate(const SystemSpec& system, const HistoryFunction& history, double T,
                     const IntegratorOptions& opt) {
  if (!(T >= 0.0)) throw std::invalid_argument("integration horizon must be nonnegative");
  Integrator it(system, history, opt);
  it.advance_to(T);
  return it.take();
}

HistoryFunction segment_at(const Trajectory& traj, double t) {
  if (t < -kTimeEps || t > traj.t_end() + kTimeEps) throw std::out_of_range("segment time outside [0, T]");
  std::vector<Piece> pieces;
  for (const Piece& p : traj.function().slice(t - 1.0, t)) {
    if (p.t1 - p.t0 <= 1e-15) continue;
    pieces.push_back(p.shifted(-t));
  }
  pieces.front().t0 = -1.0;
  pieces.back().t1 = 0.0;
  return HistoryFunction(std::move(pieces), HistoryTag::Sampled);
}

BoundsReport check_bounds(const Trajectory& traj, double tol) {
  BoundsReport rep;
  const double T = traj.t_end();
  rep.max_value = traj.max_on(-1.0, T);
  rep.min_value = traj.min_on(-1.0, T);
  if (traj.system()) {
    rep.band_upper = traj.system()->band_upper();
    rep.lipschitz_bound = traj.system()->lipschitz_bound();
  }
  const HistoryFunction& h = traj.history();
  rep.start_in_band = h.min() >= -tol && h.max() <= rep.band_upper + tol;
  for (const Piece& p : traj.function().pieces()) {
    if (p.t1 <= 1.0) continue;
    const double a = std::max(1.0, p.t0);
    for (double t : {a, 0.5 * (a + p.t1), p.t1}) rep.lipschitz = std::max(rep.lipschitz, std::abs(p.slope(t)));
  }
  if (traj.system()) {
    rep.in_band = rep.max_value <= rep.band_upper + tol && rep.min_value >= -tol;
    rep.lipschitz_ok = rep.lipschitz <= rep.lipschitz_bound + tol;
  }
  return rep;
}

}  // namespace ddelab
