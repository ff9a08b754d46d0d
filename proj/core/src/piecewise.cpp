#include "ddelab/piecewise.hpp"

#include "ddelab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddelab {

double Piece::value(double t) const {
  const double x = t - t0;
  double v = ((poly[3] * x + poly[2]) * x + poly[1]) * x + poly[0];
  if (expo != 0.0) v += expo * std::exp(-rate * x);
  return v;
}

double Piece::slope(double t) const {
  const double x = t - t0;
  double v = (3.0 * poly[3] * x + 2.0 * poly[2]) * x + poly[1];
  if (expo != 0.0) v -= rate * expo * std::exp(-rate * x);
  return v;
}

Piece Piece::restricted(double a, double b) const {
  Piece p = *this;
  const double x = a - t0;
  p.t0 = a;
  p.t1 = b;
  if (x != 0.0) {
    p.expo = expo * std::exp(-rate * x);
    p.poly[0] = ((poly[3] * x + poly[2]) * x + poly[1]) * x + poly[0];
    p.poly[1] = (3.0 * poly[3] * x + 2.0 * poly[2]) * x + poly[1];
    p.poly[2] = 3.0 * poly[3] * x + poly[2];
    p.poly[3] = poly[3];
  }
  return p;
}

Piece Piece::shifted(double dt) const {
  Piece p = *this;
  p.t0 += dt;
  p.t1 += dt;
  return p;
}

Piece Piece::scaled(double factor) const {
  Piece p = *this;
  p.expo *= factor;
  for (double& c : p.poly) c *= factor;
  return p;
}

Piece Piece::constant(double a, double b, double v) {
  Piece p;
  p.t0 = a;
  p.t1 = b;
  p.poly[0] = v;
  return p;
}

Piece Piece::linear(double a, double b, double v0, double v1) {
  Piece p;
  p.t0 = a;
  p.t1 = b;
  p.poly[0] = v0;
  p.poly[1] = (v1 - v0) / (b - a);
  return p;
}

Piece Piece::hermite(double a, double b, double v0, double d0, double v1, double d1) {
  Piece p;
  p.t0 = a;
  p.t1 = b;
  const double w = b - a;
  const double s = (v1 - v0) / w;
  p.poly[0] = v0;
  p.poly[1] = d0;
  p.poly[2] = (3.0 * s - 2.0 * d0 - d1) / w;
  p.poly[3] = (d0 + d1 - 2.0 * s) / (w * w);
  return p;
}

PiecewiseFunction::PiecewiseFunction(double origin, double cell_width)
    : origin_(origin), width_(cell_width) {
  if (!(cell_width > 0.0)) throw std::invalid_argument("cell width must be positive");
}

void PiecewiseFunction::append(const Piece& p) {
  if (!(p.t1 > p.t0)) throw std::invalid_argument("piece must have positive length");
  const std::size_t idx = pieces_.size();
  pieces_.push_back(p);
  while (origin_ + static_cast<double>(first_.size()) * width_ < p.t1) first_.push_back(idx);
  if (first_.empty()) first_.push_back(idx);
}

std::size_t PiecewiseFunction::locate(double t) const {
  if (pieces_.empty()) throw std::out_of_range("empty piecewise function");
  double c = std::floor((t - origin_) / width_);
  std::size_t cell = 0;
  if (c > 0.0) cell = std::min(static_cast<std::size_t>(c), first_.size() - 1);
  std::size_t i = first_[cell];
  const std::size_t n = pieces_.size();
  while (i > 0 && pieces_[i].t0 > t) --i;
  while (i + 1 < n && pieces_[i].t1 <= t) ++i;
  return i;
}

double PiecewiseFunction::value(double t) const { return pieces_[locate(t)].value(t); }

double PiecewiseFunction::slope(double t) const { return pieces_[locate(t)].slope(t); }

std::vector<Piece> PiecewiseFunction::slice(double a, double b) const {
  std::vector<Piece> out;
  if (pieces_.empty() || b < a) return out;
  std::size_t i = locate(a);
  for (; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (p.t0 >= b && !out.empty()) break;
    double lo = std::max(a, p.t0);
    double hi = std::min(b, p.t1);
    if (hi > lo) out.push_back(p.restricted(lo, hi));
    if (p.t1 >= b) break;
  }
  return out;
}

namespace {

// Extreme values of a piece on [a, b] (slope zeros located by bisection).
void piece_extrema(const Piece& p, double a, double b, double& lo, double& hi) {
  auto visit = [&](double t) {
    double v = p.value(t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  visit(a);
  visit(b);
  constexpr int kSamples = 6;
  double prev_t = a;
  double prev_s = p.slope(a);
  for (int j = 1; j <= kSamples; ++j) {
    double t = a + (b - a) * j / kSamples;
    double s = p.slope(t);
    if ((prev_s < 0.0 && s > 0.0) || (prev_s > 0.0 && s < 0.0)) {
      visit(bisect([&](double x) { return p.slope(x); }, prev_t, t, 0.0, 80));
    }
    prev_t = t;
    prev_s = s;
  }
}

}  // namespace

double PiecewiseFunction::max_on(double a, double b) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Piece& p : slice(a, b)) piece_extrema(p, p.t0, p.t1, lo, hi);
  if (a == b) return value(a);
  return hi;
}

double PiecewiseFunction::min_on(double a, double b) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Piece& p : slice(a, b)) piece_extrema(p, p.t0, p.t1, lo, hi);
  if (a == b) return value(a);
  return lo;
}

void scan_piece_crossings(const Piece& p, double level, int& last_sign, double& last_t,
                          std::vector<Crossing>& out) {
  constexpr int kSamples = 4;
  for (int j = 0; j <= kSamples; ++j) {
    double t = j == kSamples ? p.t1 : p.t0 + (p.t1 - p.t0) * j / kSamples;
    double v = p.value(t) - level;
    int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      double lo = std::max(last_t, p.t0);
      double root;
      if (p.value(lo) - level == 0.0) {
        root = lo;
      } else {
        root = bisect([&](double x) { return p.value(x) - level; }, lo, t, 0.0, 200);
      }
      out.push_back({root, last_sign < 0 ? CrossingDirection::Up : CrossingDirection::Down});
    }
    last_sign = s;
    last_t = t;
  }
}

std::vector<Crossing> PiecewiseFunction::crossings(double level, double a, double b) const {
  std::vector<Crossing> out;
  int last_sign = 0;
  double last_t = a;
  for (const Piece& p : slice(a, b)) scan_piece_crossings(p, level, last_sign, last_t, out);
  return out;
}

}  // namespace ddelab
