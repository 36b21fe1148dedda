#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace lpapp {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      const int d0 = static_cast<int>(std::ceil(lo - 1e-9)), d1 = static_cast<int>(std::floor(hi + 1e-9));
      const int stride = std::max(1, (d1 - d0) / 8 + 1);
      for (int d = d0; d <= d1; d += stride) t.push_back(std::pow(10.0, d));
      return t;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
  }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

Axis make_axis(const std::vector<Series>& s, bool xaxis, bool log) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& se : s) {
    const auto& v = xaxis ? se.x : se.y;
    for (double a : v)
      if (usable(a, log)) {
        const double w = log ? std::log10(a) : a;
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
  }
  if (!std::isfinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  if (!log) {
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return {lo, hi, log};
}

}  // namespace

std::string line_chart(const ChartOptions& o, const std::vector<Series>& series) {
  const double left = 78, right = 20, top = 40, bottom = 56;
  const double x0 = left, x1 = o.width - right, y0 = o.height - bottom, y1 = top;
  const Axis ax = make_axis(series, true, o.logx), ay = make_axis(series, false, o.logy);
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      o.width, o.height, o.width, o.height);
  s += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", o.width, o.height);
  s += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", o.width / 2, escape(o.title));
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n", x0, y1, x1 - x0, y0 - y1);
  for (double t : ax.ticks()) {
    const double px = ax.map(t, x0, x1);
    s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", px, y1, y0);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n", px, y0 + 16, t);
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t, y0, y1);
    s += fmt::format("<line x1=\"{1}\" y1=\"{0:.2f}\" x2=\"{2}\" y2=\"{0:.2f}\" stroke=\"#ddd\"/>\n", py, x0, x1);
    s += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", x0 - 6, py + 4, t);
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (x0 + x1) / 2, o.height - 14, escape(o.xlabel));
  s += fmt::format("<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
                   (y0 + y1) / 2, escape(o.ylabel));
  int legend = 0;
  for (const auto& se : series) {
    std::string pts;
    std::string marks;
    for (std::size_t i = 0; i < se.x.size() && i < se.y.size(); ++i) {
      if (!usable(se.x[i], o.logx) || !usable(se.y[i], o.logy)) continue;
      const double px = ax.map(se.x[i], x0, x1), py = ay.map(se.y[i], y0, y1);
      pts += fmt::format("{:.2f},{:.2f} ", px, py);
      if (se.markers) marks += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px, py, se.color);
    }
    if (!pts.empty()) {
      pts.pop_back();
      s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{} points=\"{}\"/>\n", se.color,
                       se.dashed ? " stroke-dasharray=\"6 4\"" : "", pts);
    }
    s += marks;
    const double ly = y1 + 16 + 16 * legend++;
    s += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n", x1 - 150,
                     ly - 4, x1 - 126, ly - 4, se.color, se.dashed ? " stroke-dasharray=\"6 4\"" : "");
    s += fmt::format("<text x=\"{}\" y=\"{:.1f}\">{}</text>\n", x1 - 120, ly, escape(se.name));
  }
  s += "</svg>\n";
  return s;
}

}  // namespace lpapp
