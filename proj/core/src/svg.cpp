#include "optstudy/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace optstudy {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
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
      default: out.push_back(c);
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
    if (!std::isfinite(lo)) { lo = 0.0; hi = 1.0; }
    if (hi - lo <= 0.0) {
      const double pad = std::max(std::abs(lo) * 0.05, 0.5);
      lo -= pad;
      hi += pad;
      return;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

std::string header(const std::string& title) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
       "</text>\n";
  return s;
}

std::string line(double x1, double y1, double x2, double y2, const char* stroke = "#000") {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
         "\" stroke=\"" + stroke + "\"/>\n";
}

std::string text(double x, double y, const std::string& body, const char* anchor, const std::string& extra = {}) {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" +
         escape(body) + "</text>\n";
}

} // namespace

std::string render_response_svg(const ResponsePlot& plot) {
  Range xr, yr;
  for (const auto& [x, y] : plot.samples) { xr.add(x); yr.add(y); }
  for (const auto& [x, y] : plot.curve) { xr.add(x); yr.add(y); }
  xr.finish();
  yr.finish();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::string s = header(plot.title);
  s += line(kLeft, kTop + ph, kLeft + pw, kTop + ph);
  s += line(kLeft, kTop, kLeft, kTop + ph);
  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    s += line(sx(fx), kTop + ph, sx(fx), kTop + ph + 5);
    s += text(sx(fx), kTop + ph + 18, tick(fx), "middle");
    s += line(kLeft - 5, sy(fy), kLeft, sy(fy));
    s += text(kLeft - 8, sy(fy) + 4, tick(fy), "end");
  }
  s += text(kLeft + pw / 2, kHeight - 16, plot.x_label, "middle");
  s += text(18, kTop + ph / 2, plot.y_label, "middle",
            " transform=\"rotate(-90 18 " + num(kTop + ph / 2) + ")\"");
  if (!plot.curve.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < plot.curve.size(); ++i) {
      if (i) s += ' ';
      s += num(sx(plot.curve[i].first)) + "," + num(sy(plot.curve[i].second));
    }
    s += "\"/>\n";
  }
  for (const auto& [x, y] : plot.samples)
    s += "<circle cx=\"" + num(sx(x)) + "\" cy=\"" + num(sy(y)) + "\" r=\"4\" fill=\"#d62728\"/>\n";
  s += "</svg>\n";
  return s;
}

std::string render_bars_svg(const BarPlot& plot) {
  Range yr;
  yr.add(0.0);
  for (const auto& [name, v] : plot.bars) yr.add(v);
  if (yr.hi - yr.lo <= 0.0) yr.hi = yr.lo + 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sy = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };
  const double slot = plot.bars.empty() ? pw : pw / static_cast<double>(plot.bars.size());
  const double bw = 0.6 * slot;

  std::string s = header(plot.title);
  s += line(kLeft, kTop, kLeft, kTop + ph);
  s += line(kLeft, sy(0.0), kLeft + pw, sy(0.0));
  for (int i = 0; i <= 4; ++i) {
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    s += line(kLeft - 5, sy(fy), kLeft, sy(fy));
    s += text(kLeft - 8, sy(fy) + 4, tick(fy), "end");
  }
  s += text(18, kTop + ph / 2, plot.y_label, "middle",
            " transform=\"rotate(-90 18 " + num(kTop + ph / 2) + ")\"");
  for (std::size_t i = 0; i < plot.bars.size(); ++i) {
    const auto& [name, v] = plot.bars[i];
    const double x = kLeft + slot * static_cast<double>(i) + 0.5 * (slot - bw);
    const double top = sy(std::max(v, 0.0));
    const double h = std::abs(sy(v) - sy(0.0));
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(top) + "\" width=\"" + num(bw) + "\" height=\"" + num(h) +
         "\" fill=\"" + (v >= 0.0 ? "#1f77b4" : "#ff7f0e") + "\"/>\n";
    s += text(x + bw / 2, kTop + ph + 18, name, "middle");
    s += text(x + bw / 2, (v >= 0.0 ? top - 4 : top + h + 14), tick(v), "middle");
  }
  s += "</svg>\n";
  return s;
}

} // namespace optstudy
