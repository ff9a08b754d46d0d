#include "ddelab/spectrum.hpp"

#include "ddelab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddelab {

using cplx = std::complex<double>;

std::vector<double> StationarySet::interior() const {
  std::vector<double> out;
  for (const auto& p : points)
    if (p.value > 0.0) out.push_back(p.value);
  return out;
}

double limit_unstable_point(const SystemSpec& s) {
  if (s.kind != SystemKind::Limit) throw std::invalid_argument("closed form needs a limit system");
  const double k = s.feedback.k();
  if (!(k > 1.0)) throw std::invalid_argument("closed form needs k > 1");
  return std::pow(s.decay / s.gain, 1.0 / (k - 1.0));
}

StationarySet stationary_points(const SystemSpec& s, double ceiling, int grid) {
  if (!(ceiling > 0.0)) throw std::invalid_argument("scan ceiling must be positive");
  auto F = [&](double x) { return -s.decay * x + s.forcing(x); };
  auto classify = [&](double x) {
    return s.forcing_derivative(x) > s.decay ? Stability::Unstable : Stability::StableCandidate;
  };
  StationarySet set;
  set.ceiling = ceiling;
  set.points.push_back({0.0, classify(0.0), 0.0});
  double prev_x = 0.0;
  double prev_f = 0.0;
  for (int i = 1; i <= grid; ++i) {
    const double x = ceiling * i / grid;
    const double f = F(x);
    double root = -1.0;
    if (f == 0.0) {
      root = x;
    } else if (prev_f != 0.0 && (prev_f < 0.0) != (f < 0.0)) {
      root = bisect(F, prev_x, x, 0.0, 200);
    }
    if (root > 0.0) {
      if (s.kind == SystemKind::Limit && s.feedback.k() > 1.0) {
        const double closed = limit_unstable_point(s);
        if (std::abs(closed - root) < 1e-9) root = closed;
      }
      const double res = std::abs(F(root));
      // Brackets around the cutoff jump are not zeros.
      if (res < 1e-10 && (set.points.empty() || std::abs(set.points.back().value - root) > 1e-12))
        set.points.push_back({root, classify(root), res});
    }
    prev_x = x;
    prev_f = f;
  }
  return set;
}

double unstable_point(const SystemSpec& s) {
  if (s.kind == SystemKind::Limit) return limit_unstable_point(s);
  const double ceiling = 1.0;
  StationarySet set = stationary_points(s, ceiling);
  for (const auto& p : set.points)
    if (p.value > 0.0 && p.stability == Stability::Unstable) return p.value;
  throw std::runtime_error("no unstable interior stationary point below 1 (gain too close to decay?)");
}

RealRoot leading_real_root(double a, double mu) {
  if (!(a > 0.0) || !(mu > 0.0)) throw std::invalid_argument("need a > 0 and mu > 0");
  auto L = [&](double x) { return x + a - mu * std::exp(-x); };
  if (mu == a) return {0.0, true};
  if (mu > a) return {bisect(L, 0.0, mu, 0.0, 300), true};
  return {bisect(L, -a, 0.0, 0.0, 300), false};
}

double characteristic_residual(double a, double mu, cplx lambda) {
  return std::abs(lambda + a - mu * std::exp(-lambda));
}

namespace {

bool newton_root(double a, double mu, cplx& z) {
  for (int it = 0; it < 200; ++it) {
    cplx e = mu * std::exp(-z);
    cplx h = z + a - e;
    cplx dz = h / (1.0 + e);
    z -= dz;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) return true;
  }
  return characteristic_residual(a, mu, z) < 1e-10;
}

bool in_strip(cplx z, int j) {
  const double pi = std::numbers::pi;
  return z.imag() > (2 * j - 1) * pi && z.imag() < 2 * j * pi;
}

}  // namespace

std::vector<ComplexRoot> complex_roots(double a, double mu, int count) {
  if (!(mu > 0.0)) throw std::invalid_argument("complex_roots needs mu > 0");
  const double pi = std::numbers::pi;
  std::vector<ComplexRoot> out;
  for (int j = 1; j <= count; ++j) {
    ComplexRoot r;
    r.j = j;
    cplx z(-a, (2 * j - 0.5) * pi);
    bool ok = newton_root(a, mu, z) && in_strip(z, j);
    if (!ok) {
      // Phase condition on the strip: x = -a - y cot y and mu e^{-x} = -y / sin y.
      r.newton = false;
      auto phi = [&](double y) { return std::log(mu) + a + y / std::tan(y) - std::log(y / std::abs(std::sin(y))); };
      try {
        double y = bisect(phi, (2 * j - 1) * pi + 1e-12, 2 * j * pi - 1e-12, 0.0, 300);
        z = cplx(-a - y / std::tan(y), y);
        newton_root(a, mu, z);
        ok = in_strip(z, j);
      } catch (const RootNotBracketed&) {
        ok = false;
      }
    }
    r.value = z;
    r.residual = characteristic_residual(a, mu, z);
    r.hole = !ok || r.residual > 1e-10;
    out.push_back(r);
  }
  return out;
}

SpectrumReport spectrum(double a, double mu, int count) {
  SpectrumReport rep;
  rep.a = a;
  rep.mu = mu;
  rep.lambda0 = leading_real_root(a, mu).value;
  rep.pairs = complex_roots(a, mu, count);
  rep.max_residual = characteristic_residual(a, mu, cplx(rep.lambda0, 0.0));
  double prev = rep.lambda0;
  for (const auto& r : rep.pairs) {
    rep.max_residual = std::max(rep.max_residual, r.residual);
    if (!(r.value.real() < prev)) rep.ordered = false;
    prev = r.value.real();
  }
  rep.gap_high = std::exp(rep.lambda0);
  rep.gap_low = rep.pairs.empty() ? 0.0 : std::exp(rep.pairs.front().value.real());
  return rep;
}

SpectrumReport spectrum_at_unstable_point(const SystemSpec& s, int count) {
  const double xi = unstable_point(s);
  return spectrum(s.decay, s.forcing_derivative(xi), count);
}

nlohmann::json SpectrumReport::to_json() const {
  nlohmann::json pairs_json = nlohmann::json::array();
  for (const auto& r : pairs)
    pairs_json.push_back({{"j", r.j},
                          {"re", r.value.real()},
                          {"im", r.value.imag()},
                          {"residual", r.residual},
                          {"newton", r.newton},
                          {"hole", r.hole}});
  return {{"a", a},
          {"mu", mu},
          {"lambda0", lambda0},
          {"pairs", pairs_json},
          {"gap", {gap_low, gap_high}},
          {"max_residual", max_residual},
          {"ordered", ordered}};
}

double solve_theta(double c, int j) {
  if (!(c > 0.0) || j < 1) throw std::invalid_argument("solve_theta needs c > 0 and j >= 1");
  const double pi = std::numbers::pi;
  auto F = [&](double t) { return t + c * std::tan(t); };
  return bisect(F, 2 * j * pi - 0.5 * pi + 1e-14, 2 * j * pi, 0.0, 300);
}

double transversality(double a, double theta) {
  return theta * theta / ((1.0 + a) * (1.0 + a) + theta * theta);
}

cplx track_hopf_root(double a, double big_b, double theta, double alpha) {
  cplx z(0.0, theta);
  const double s = 1.0 + alpha;
  for (int it = 0; it < 100; ++it) {
    cplx e = big_b * std::exp(-z);
    cplx h = z + s * (a - e);
    cplx dz = h / (1.0 + s * e);
    z -= dz;
    if (std::abs(dz) < 1e-16 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

double transversality_fd(double a, double big_b, double theta, double step) {
  return (track_hopf_root(a, big_b, theta, step).real() - track_hopf_root(a, big_b, theta, -step).real()) /
         (2.0 * step);
}

double prototype_hopf_c(int j) {
  return (2.0 * j * std::numbers::pi - std::numbers::pi / 3.0) / std::sqrt(3.0);
}

HopfData hopf_data(double c, double d, double k, int n, int j, double alpha) {
  HopfData h;
  h.j = j;
  h.c = c;
  h.d = d;
  h.n = n;
  h.k = k;
  h.alpha = alpha;
  const SystemSpec lim = SystemSpec::limit(c, d, k);
  h.xi1 = limit_unstable_point(lim);
  h.theta = solve_theta(c, j);
  h.theta_residual = std::abs(h.theta + c * std::tan(h.theta));
  const double dg = d * lim.feedback.derivative(h.xi1);
  h.cg_residual = std::abs(c - dg * std::cos(h.theta));
  if (h.cg_residual > 1e-8)
    throw std::invalid_argument("Hopf condition c = d g'(xi_1) cos(theta_j) fails for these (c, d, j)");
  const SystemSpec sm = SystemSpec::smooth(c, d, k, n);
  h.xi1n = unstable_point(sm);
  const double big_d = sm.forcing_derivative(h.xi1n);
  const double ratio = c / big_d;
  if (!(ratio > 0.0 && ratio < 1.0)) throw HopfUnavailable("cos(theta_n) outside (0,1): no Hopf angle at this n");
  h.theta_n = 2.0 * j * std::numbers::pi - std::acos(ratio);
  h.beta_n = -h.theta_n / (c * std::tan(h.theta_n));
  h.a_n = (1.0 + alpha) * h.beta_n * c;
  h.b_n = (1.0 + alpha) * h.beta_n * d;
  h.transversality = transversality(h.beta_n * c, h.theta_n);
  h.transversality_limit = transversality(c, h.theta);
  return h;
}

nlohmann::json HopfData::to_json() const {
  return {{"j", j},
          {"c", c},
          {"d", d},
          {"n", n},
          {"k", k},
          {"alpha", alpha},
          {"theta", theta},
          {"theta_n", theta_n},
          {"beta_n", beta_n},
          {"xi1", xi1},
          {"xi1n", xi1n},
          {"a_n", a_n},
          {"b_n", b_n},
          {"cg_residual", cg_residual},
          {"theta_residual", theta_residual},
          {"transversality", transversality},
          {"transversality_limit", transversality_limit}};
}

}  // namespace ddelab
