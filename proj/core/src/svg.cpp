#include "ddelab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace ddelab {

std::string role_color(SeriesRole role) {
  switch (role) {
    case SeriesRole::Plus: return "#1f4e9c";
    case SeriesRole::Minus: return "#2e8b3a";
    case SeriesRole::Stationary: return "#000000";
    case SeriesRole::Hopf: return "#e8830c";
    case SeriesRole::Other: return "#7f7f7f";
  }
  return "#7f7f7f";
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
      const double pad = std::max(0.5, 0.1 * std::abs(lo));
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

struct Panel {
  double x0, y0, w, h;
  Range rx, ry;
  double px(double v) const { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * w; }
  double py(double v) const { return y0 + h - (v - ry.lo) / (ry.hi - ry.lo) * h; }
};

void frame(std::string& out, const Panel& p, const std::string& xlabel, const std::string& ylabel) {
  out += "<rect x=\"" + num(p.x0) + "\" y=\"" + num(p.y0) + "\" width=\"" + num(p.w) + "\" height=\"" + num(p.h) +
         "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = p.rx.lo + (p.rx.hi - p.rx.lo) * i / 4.0;
    const double fy = p.ry.lo + (p.ry.hi - p.ry.lo) * i / 4.0;
    out += "<text x=\"" + num(p.px(fx)) + "\" y=\"" + num(p.y0 + p.h + 14) +
           "\" font-size=\"10\" text-anchor=\"middle\">" + tick(fx) + "</text>\n";
    out += "<text x=\"" + num(p.x0 - 4) + "\" y=\"" + num(p.py(fy) + 3) +
           "\" font-size=\"10\" text-anchor=\"end\">" + tick(fy) + "</text>\n";
  }
  out += "<text x=\"" + num(p.x0 + p.w / 2) + "\" y=\"" + num(p.y0 + p.h + 30) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
  out += "<text x=\"" + num(p.x0 - 40) + "\" y=\"" + num(p.y0 + p.h / 2) + "\" font-size=\"11\" transform=\"rotate(-90 " +
         num(p.x0 - 40) + " " + num(p.y0 + p.h / 2) + ")\" text-anchor=\"middle\">" + escape(ylabel) + "</text>\n";
}

void polyline(std::string& out, const Panel& p, const std::vector<double>& xs, const std::vector<double>& ys,
              const std::string& color, int max_points) {
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n == 0) return;
  const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / max_points);
  out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.2\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < n; i += stride) {
    if (!first) out += " ";
    out += num(p.px(xs[i])) + "," + num(p.py(ys[i]));
    first = false;
  }
  if ((n - 1) % stride != 0) out += " " + num(p.px(xs[n - 1])) + "," + num(p.py(ys[n - 1]));
  if (n == 1) out += " " + num(p.px(xs[0]) + 1.0) + "," + num(p.py(ys[0]));
  out += "\"/>\n";
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const PlotStyle& style) {
  bool any = false;
  bool phase = false;
  for (const Series& s : series) {
    if (s.t.size() != s.x.size()) throw std::invalid_argument("series '" + s.label + "': t and x differ in length");
    if (!s.x_delayed.empty() && s.x_delayed.size() != s.x.size())
      throw std::invalid_argument("series '" + s.label + "': x_delayed has the wrong length");
    any = any || !s.x.empty();
    phase = phase || !s.x_delayed.empty();
  }
  if (!any) throw std::invalid_argument("nothing to plot: empty input");

  const double margin = 56.0;
  const double top = style.title.empty() ? 16.0 : 36.0;
  Panel tp{margin, top, double(style.panel_width), double(style.panel_height), {}, {}};
  Panel pp{2 * margin + style.panel_width + 16, top, double(style.panel_height), double(style.panel_height), {}, {}};
  for (const Series& s : series) {
    for (double v : s.t) tp.rx.add(v);
    for (double v : s.x) tp.ry.add(v);
    for (std::size_t i = 0; i < s.x_delayed.size(); ++i) {
      pp.rx.add(s.x[i]);
      pp.ry.add(s.x_delayed[i]);
    }
  }
  tp.rx.finish();
  tp.ry.finish();
  pp.rx.finish();
  pp.ry.finish();

  const double width = phase ? pp.x0 + pp.w + 24 : tp.x0 + tp.w + 24;
  const double height = top + style.panel_height + 48 + 16.0 * series.size();
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!style.title.empty())
    out += "<text x=\"" + num(width / 2) + "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">" +
           escape(style.title) + "</text>\n";
  frame(out, tp, "t", "x(t)");
  for (const Series& s : series) polyline(out, tp, s.t, s.x, role_color(s.role), style.max_points);
  if (phase) {
    frame(out, pp, "x(t)", "x(t-1)");
    for (const Series& s : series)
      if (!s.x_delayed.empty()) polyline(out, pp, s.x, s.x_delayed, role_color(s.role), style.max_points);
  }
  double ly = top + style.panel_height + 48;
  for (const Series& s : series) {
    out += "<line x1=\"" + num(margin) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(margin + 20) + "\" y2=\"" +
           num(ly - 4) + "\" stroke=\"" + role_color(s.role) + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(margin + 26) + "\" y=\"" + num(ly) + "\" font-size=\"11\">" + escape(s.label) +
           "</text>\n";
    ly += 16.0;
  }
  out += "</svg>\n";
  return out;
}

Series series_from_csv(const CsvTable& table, const std::string& label, SeriesRole role) {
  const int it = table.column("t");
  int ix = table.column("x");
  if (ix < 0) ix = table.column("value");
  if (it < 0 || ix < 0) throw std::invalid_argument("csv needs columns t and x (or value)");
  Series s;
  s.label = label;
  s.role = role;
  s.t = table.cols[it];
  s.x = table.cols[ix];
  const int id = table.column("x_delayed");
  if (id >= 0) s.x_delayed = table.cols[id];
  return s;
}

}  // namespace ddelab
