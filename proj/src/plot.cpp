#include <algorithm>
#include <cmath>
#include <cstdio>

#include "resograph/experiment.hpp"

namespace resograph {

namespace {

constexpr double kWidth = 720.0, kHeight = 440.0;
constexpr double kLeft = 70.0, kRight = 170.0, kTop = 40.0, kBottom = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

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

// Roughly five round tick values spanning [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(v);
  return out;
}

}  // namespace

std::string dim_color(int dim) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#9467bd"};
  return palette[std::clamp(dim, 0, 2)];
}

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<PlotLine>& lines,
                          bool log_x) {
  double xmin = kInfinity, xmax = -kInfinity, ymin = 0.0, ymax = -kInfinity;
  for (const auto& l : lines) {
    for (const auto& [x, y] : l.points) {
      if (!std::isfinite(x) || (log_x && x <= 0.0)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      if (std::isfinite(y)) ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0;
  if (!std::isfinite(ymax) || ymax <= ymin) ymax = ymin + 1.0;
  ymax *= 1.05;
  const auto tx = [&](double x) {
    const double u = log_x ? (xmax > xmin ? (std::log10(x) - std::log10(xmin)) /
                                                (std::log10(xmax) - std::log10(xmin))
                                          : 0.5)
                           : (xmax > xmin ? (x - xmin) / (xmax - xmin) : 0.5);
    return kLeft + u * (kWidth - kLeft - kRight);
  };
  const auto ty = [&](double y) {
    return kHeight - kBottom - (y - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
       num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(title) + "</text>\n";
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  s += "<path d=\"M" + num(x0) + " " + num(y1) + " V" + num(y0) + " H" + num(x1) +
       "\" stroke=\"black\" fill=\"none\"/>\n";

  std::vector<double> xt;
  if (log_x) {
    for (double p = std::floor(std::log10(xmin)); p <= std::ceil(std::log10(xmax)); p += 1.0) {
      const double v = std::pow(10.0, p);
      if (v >= xmin * (1 - 1e-12) && v <= xmax * (1 + 1e-12)) xt.push_back(v);
    }
    if (xt.empty()) xt = {xmin, xmax};
  } else {
    xt = nice_ticks(xmin, xmax);
  }
  for (double v : xt) {
    s += "<line x1=\"" + num(tx(v)) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(tx(v)) + "\" y2=\"" +
         num(y0 + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(tx(v)) + "\" y=\"" + num(y0 + 18) + "\" text-anchor=\"middle\">" +
         tick_label(v) + "</text>\n";
  }
  for (double v : nice_ticks(ymin, ymax)) {
    s += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(ty(v)) + "\" x2=\"" + num(x0) + "\" y2=\"" +
         num(ty(v)) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(ty(v) + 4) + "\" text-anchor=\"end\">" +
         tick_label(v) + "</text>\n";
  }
  s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 15) +
       "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
  s += "<text transform=\"translate(18," + num((y0 + y1) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape(ylabel) + "</text>\n";

  double legend_y = kTop + 10;
  for (const auto& l : lines) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : l.points) {
      if (std::isfinite(p.first) && (!log_x || p.first > 0.0)) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end());
    const std::string dash = l.dashed ? " stroke-dasharray=\"6,4\"" : "";
    std::string d;
    bool pen = false;
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(y)) {
        pen = false;
        continue;
      }
      d += (pen ? " L" : " M") + num(tx(x)) + " " + num(ty(y));
      pen = true;
    }
    if (!d.empty()) {
      s += "<path d=\"" + d.substr(1) + "\" stroke=\"" + l.color + "\" stroke-width=\"2\" fill=\"none\"" +
           dash + "/>\n";
    }
    if (!l.dashed) {
      for (const auto& [x, y] : pts) {
        if (std::isfinite(y)) {
          s += "<circle cx=\"" + num(tx(x)) + "\" cy=\"" + num(ty(y)) + "\" r=\"2.5\" fill=\"" +
               l.color + "\"/>\n";
        }
      }
    }
    s += "<line x1=\"" + num(x1 + 12) + "\" y1=\"" + num(legend_y) + "\" x2=\"" + num(x1 + 36) +
         "\" y2=\"" + num(legend_y) + "\" stroke=\"" + l.color + "\" stroke-width=\"2\"" + dash + "/>\n";
    s += "<text x=\"" + num(x1 + 42) + "\" y=\"" + num(legend_y + 4) + "\">" + escape(l.label) +
         "</text>\n";
    legend_y += 18;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace resograph
