#include "ddelab/history.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddelab {

namespace {

constexpr double kJoinTol = 1e-12;

void check_mesh(const std::vector<double>& mesh, const std::vector<double>& values) {
  if (mesh.size() < 2 || mesh.size() != values.size())
    throw std::invalid_argument("history mesh needs >= 2 nodes matching the value count");
  if (std::abs(mesh.front() + 1.0) > kJoinTol || std::abs(mesh.back()) > kJoinTol)
    throw std::invalid_argument("history mesh must span [-1, 0]");
  for (std::size_t i = 1; i < mesh.size(); ++i)
    if (!(mesh[i] > mesh[i - 1])) throw std::invalid_argument("history mesh must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("history values must be finite");
}

}  // namespace

HistoryFunction::HistoryFunction(std::vector<Piece> pieces, HistoryTag tag)
    : pieces_(std::move(pieces)), tag_(tag) {
  if (pieces_.empty()) throw std::invalid_argument("history needs at least one piece");
  if (std::abs(pieces_.front().t0 + 1.0) > kJoinTol || std::abs(pieces_.back().t1) > kJoinTol)
    throw std::invalid_argument("history pieces must cover [-1, 0]");
  pieces_.front().t0 = -1.0;
  pieces_.back().t1 = 0.0;
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    if (std::abs(pieces_[i].t0 - pieces_[i - 1].t1) > kJoinTol)
      throw std::invalid_argument("history pieces must be contiguous");
    double l = pieces_[i - 1].value(pieces_[i - 1].t1);
    double r = pieces_[i].value(pieces_[i].t0);
    if (std::abs(l - r) > 1e-9 * std::max(1.0, std::abs(l)))
      throw std::invalid_argument("history must be continuous");
  }
}

HistoryFunction HistoryFunction::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("constant history must be finite");
  HistoryFunction h({Piece::constant(-1.0, 0.0, value)}, HistoryTag::Constant);
  h.descriptor_ = {{"kind", "constant"}, {"value", value}};
  return h;
}

HistoryFunction HistoryFunction::exponential(double amplitude, double rate, double offset) {
  Piece p = Piece::constant(-1.0, 0.0, offset);
  p.rate = rate;
  p.expo = amplitude;
  HistoryFunction h({p}, HistoryTag::Exponential);
  h.descriptor_ = {{"kind", "exponential"}, {"amplitude", amplitude}, {"rate", rate}, {"offset", offset}};
  return h;
}

HistoryFunction HistoryFunction::from_samples(const std::vector<double>& mesh,
                                              const std::vector<double>& values) {
  check_mesh(mesh, values);
  const std::size_t n = mesh.size();
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (values[i + 1] - values[i]) / (mesh[i + 1] - mesh[i]);
  std::vector<double> d(n);
  d[0] = secant[0];
  d[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double hl = mesh[i] - mesh[i - 1];
    double hr = mesh[i + 1] - mesh[i];
    d[i] = (hr * secant[i - 1] + hl * secant[i]) / (hl + hr);
  }
  std::vector<Piece> pieces;
  pieces.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    pieces.push_back(Piece::hermite(mesh[i], mesh[i + 1], values[i], d[i], values[i + 1], d[i + 1]));
  HistoryFunction h(std::move(pieces), HistoryTag::Sampled);
  h.descriptor_ = {{"kind", "samples"}, {"mesh", mesh}, {"values", values}};
  return h;
}

HistoryFunction HistoryFunction::piecewise_linear(const std::vector<double>& mesh,
                                                  const std::vector<double>& values) {
  check_mesh(mesh, values);
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i)
    pieces.push_back(Piece::linear(mesh[i], mesh[i + 1], values[i], values[i + 1]));
  HistoryFunction h(std::move(pieces), HistoryTag::Sampled);
  h.descriptor_ = {{"kind", "linear"}, {"mesh", mesh}, {"values", values}};
  return h;
}

HistoryFunction HistoryFunction::from_function(const std::function<double(double)>& f,
                                               const std::function<double(double)>& df, int cells) {
  if (cells < 1) throw std::invalid_argument("history needs at least one cell");
  std::vector<Piece> pieces;
  pieces.reserve(cells);
  for (int i = 0; i < cells; ++i) {
    double a = -1.0 + static_cast<double>(i) / cells;
    double b = -1.0 + static_cast<double>(i + 1) / cells;
    if (i + 1 == cells) b = 0.0;
    pieces.push_back(Piece::hermite(a, b, f(a), df(a), f(b), df(b)));
  }
  return HistoryFunction(std::move(pieces), HistoryTag::Sampled);
}

const Piece& HistoryFunction::piece_at(double s) const {
  if (s < -1.0 - kJoinTol || s > kJoinTol) throw std::out_of_range("history evaluated outside [-1, 0]");
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s,
                             [](double x, const Piece& p) { return x < p.t0; });
  if (it == pieces_.begin()) return pieces_.front();
  return *(it - 1);
}

double HistoryFunction::value(double s) const { return piece_at(s).value(s); }

double HistoryFunction::slope(double s) const { return piece_at(s).slope(s); }

double HistoryFunction::min() const {
  PiecewiseFunction pf(-1.0, 1.0 / std::max<std::size_t>(1, pieces_.size()));
  for (const Piece& p : pieces_) pf.append(p);
  return pf.min_on(-1.0, 0.0);
}

double HistoryFunction::max() const {
  PiecewiseFunction pf(-1.0, 1.0 / std::max<std::size_t>(1, pieces_.size()));
  for (const Piece& p : pieces_) pf.append(p);
  return pf.max_on(-1.0, 0.0);
}

std::vector<double> HistoryFunction::sample(int cells) const {
  std::vector<double> out(cells + 1);
  for (int i = 0; i <= cells; ++i) out[i] = value(i == cells ? 0.0 : -1.0 + static_cast<double>(i) / cells);
  return out;
}

double HistoryFunction::sup_distance(const HistoryFunction& other, int cells) const {
  double d = 0.0;
  for (int i = 0; i <= cells; ++i) {
    double s = i == cells ? 0.0 : -1.0 + static_cast<double>(i) / cells;
    d = std::max(d, std::abs(value(s) - other.value(s)));
  }
  return d;
}

HistoryFunction HistoryFunction::plus(const HistoryFunction& other, double scale) const {
  std::vector<double> cuts;
  for (const Piece& p : pieces_) cuts.push_back(p.t0);
  for (const Piece& p : other.pieces_) cuts.push_back(p.t0);
  cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < kJoinTol; }),
             cuts.end());
  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i];
    double b = cuts[i + 1];
    Piece p = piece_at(0.5 * (a + b)).restricted(a, b);
    Piece q = other.piece_at(0.5 * (a + b)).restricted(a, b).scaled(scale);
    bool exact = p.expo == 0.0 || q.expo == 0.0 || p.rate == q.rate;
    if (exact) {
      Piece r = p;
      if (p.expo == 0.0) r.rate = q.rate;
      r.expo = p.expo + q.expo;
      for (int c = 0; c < 4; ++c) r.poly[c] = p.poly[c] + q.poly[c];
      out.push_back(r);
    } else {
      constexpr int kSub = 8;
      for (int j = 0; j < kSub; ++j) {
        double x0 = a + (b - a) * j / kSub;
        double x1 = j + 1 == kSub ? b : a + (b - a) * (j + 1) / kSub;
        out.push_back(Piece::hermite(x0, x1, p.value(x0) + q.value(x0), p.slope(x0) + q.slope(x0),
                                     p.value(x1) + q.value(x1), p.slope(x1) + q.slope(x1)));
      }
    }
  }
  return HistoryFunction(std::move(out), HistoryTag::Sampled);
}

nlohmann::json HistoryFunction::to_json() const {
  if (!descriptor_.is_null()) return descriptor_;
  std::vector<double> mesh(201);
  for (int i = 0; i <= 200; ++i) mesh[i] = i == 200 ? 0.0 : -1.0 + i / 200.0;
  return {{"kind", "samples"}, {"mesh", mesh}, {"values", sample(200)}};
}

HistoryFunction HistoryFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("history needs a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  auto num = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number())
      throw std::invalid_argument(std::string("history.") + key + " must be a number");
    return j[key].get<double>();
  };
  if (kind == "constant") return constant(num("value"));
  if (kind == "exponential") return exponential(num("amplitude"), num("rate"), num("offset"));
  if (kind == "samples" || kind == "linear") {
    if (!j.contains("mesh") || !j.contains("values"))
      throw std::invalid_argument("sampled history needs 'mesh' and 'values'");
    auto mesh = j["mesh"].get<std::vector<double>>();
    auto values = j["values"].get<std::vector<double>>();
    return kind == "samples" ? from_samples(mesh, values) : piecewise_linear(mesh, values);
  }
  throw std::invalid_argument("unknown history kind '" + kind + "'");
}

}  // namespace ddelab
