#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli_util.hpp"

namespace hcli {

// Minimal deterministic SVG line chart: one polyline per series.
struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  // series name -> ordered (x, y)
  std::map<std::string, std::vector<std::pair<double, double>>> series;

  std::string render() const {
    const double w = 840, h = 520;
    const double ml = 90, mr = 180, mt = 50, mb = 60;
    const double pw = w - ml - mr, ph = h - mt - mb;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [name, pts] : series) {
      for (const auto& [x, y] : pts) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    if (xmin > xmax) {
      xmin = 0;
      xmax = 1;
      ymin = 0;
      ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + (ymin == 0 ? 1 : std::abs(ymin) * 0.1);
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">"
        << title << "</text>\n";

    // frame and grid
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double yv = ymin + (ymax - ymin) * i / 5.0;
      const double yy = py(yv);
      out << "<line x1=\"" << ml << "\" y1=\"" << yy << "\" x2=\"" << ml + pw << "\" y2=\"" << yy
          << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << ml - 8 << "\" y=\"" << yy + 4
          << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
          << format_sig(yv) << "</text>\n";
      const double xv = xmin + (xmax - xmin) * i / 5.0;
      const double xx = px(xv);
      out << "<line x1=\"" << xx << "\" y1=\"" << mt << "\" x2=\"" << xx << "\" y2=\"" << mt + ph
          << "\" stroke=\"#eee\"/>\n";
      out << "<text x=\"" << xx << "\" y=\"" << mt + ph + 18
          << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
          << format_sig(xv) << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 14
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    out << "<text x=\"20\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 20 "
        << mt + ph / 2 << ")\">" << y_label << "</text>\n";

    int idx = 0;
    for (const auto& [name, pts] : series) {
      const char* color = palette[idx % 8];
      std::ostringstream poly;
      for (const auto& [x, y] : pts) poly << px(x) << "," << py(y) << " ";
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
          << poly.str() << "\"/>\n";
      for (const auto& [x, y] : pts) {
        out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
      const double ly = mt + 16 + 18 * idx;
      out << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw + 34
          << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << ml + pw + 40 << "\" y=\"" << ly + 4
          << "\" font-size=\"12\" font-family=\"sans-serif\">" << name << "</text>\n";
      ++idx;
    }
    out << "</svg>\n";
    return out.str();
  }

 private:
  static std::string format_sig(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
  }
};

}  // namespace hcli
