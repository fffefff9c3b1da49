#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace ocolt::svg {

// Text-only line charts so output files can be golden-tested byte for byte.
// Coordinates are formatted with fixed precision; nothing time- or
// environment-dependent ever enters the output.

struct Series {
  std::string label;
  std::vector<double> ys;  // x is the 1-based index
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 720;
  int height = 480;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[i % 6];
}

}  // namespace detail

inline std::string render(const Chart& chart) {
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = chart.width - ml - mr;
  const double ph = chart.height - mt - mb;

  double xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool have = false;
  for (const auto& s : chart.series) {
    if (s.ys.empty()) continue;
    xmax = std::max(xmax, static_cast<double>(s.ys.size()));
    for (double y : s.ys) {
      if (!have) {
        ymin = ymax = y;
        have = true;
      } else {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (!have) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (ymax - ymin < 1e-12) {
    ymax += 1.0;
    ymin -= 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const auto px = [&](double x) { return ml + pw * (x - 1.0) / std::max(1.0, xmax - 1.0); };
  const auto py = [&](double y) { return mt + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(chart.width) + "\" height=\"" +
         std::to_string(chart.height) + "\" viewBox=\"0 0 " +
         std::to_string(chart.width) + " " + std::to_string(chart.height) +
         "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::num(chart.width / 2.0) +
         "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" "
         "text-anchor=\"middle\">" +
         chart.title + "</text>\n";

  // Axes.
  out += "<line x1=\"" + detail::num(ml) + "\" y1=\"" + detail::num(mt) +
         "\" x2=\"" + detail::num(ml) + "\" y2=\"" + detail::num(mt + ph) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + detail::num(ml) + "\" y1=\"" + detail::num(mt + ph) +
         "\" x2=\"" + detail::num(ml + pw) + "\" y2=\"" +
         detail::num(mt + ph) + "\" stroke=\"black\"/>\n";

  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double fx = 1.0 + (xmax - 1.0) * i / nticks;
    const double gx = px(fx);
    out += "<line x1=\"" + detail::num(gx) + "\" y1=\"" + detail::num(mt + ph) +
           "\" x2=\"" + detail::num(gx) + "\" y2=\"" +
           detail::num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::num(gx) + "\" y=\"" +
           detail::num(mt + ph + 20) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">" +
           detail::tick(fx) + "</text>\n";

    const double fy = ymin + (ymax - ymin) * i / nticks;
    const double gy = py(fy);
    out += "<line x1=\"" + detail::num(ml - 5) + "\" y1=\"" + detail::num(gy) +
           "\" x2=\"" + detail::num(ml) + "\" y2=\"" + detail::num(gy) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::num(ml - 8) + "\" y=\"" +
           detail::num(gy + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">" +
           detail::tick(fy) + "</text>\n";
  }
  out += "<text x=\"" + detail::num(ml + pw / 2.0) + "\" y=\"" +
         detail::num(chart.height - 12.0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">" +
         chart.x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + detail::num(mt + ph / 2.0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         detail::num(mt + ph / 2.0) + ")\">" + chart.y_label + "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    if (!s.ys.empty()) {
      std::string pts;
      for (std::size_t k = 0; k < s.ys.size(); ++k) {
        pts += detail::num(px(static_cast<double>(k + 1))) + "," +
               detail::num(py(s.ys[k]));
        if (k + 1 < s.ys.size()) pts += " ";
      }
      out += "<polyline fill=\"none\" stroke=\"" +
             std::string(detail::color(i)) + "\" stroke-width=\"1.5\" points=\"" +
             pts + "\"/>\n";
    }
    // Legend entry even for empty series, so degenerate charts stay labeled.
    const double ly = mt + 14.0 * static_cast<double>(i) + 4.0;
    out += "<line x1=\"" + detail::num(ml + 8) + "\" y1=\"" + detail::num(ly) +
           "\" x2=\"" + detail::num(ml + 28) + "\" y2=\"" + detail::num(ly) +
           "\" stroke=\"" + detail::color(i) + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::num(ml + 33) + "\" y=\"" +
           detail::num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + s.label +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ocolt::svg
