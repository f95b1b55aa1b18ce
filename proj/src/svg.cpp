#include "opinet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "opinet/common.hpp"

namespace opinet {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 610.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 420.0;

const char* kPalette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                          "#66ccee", "#aa3377", "#bbbbbb"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Frame {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;

  void include(double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }

  void pad() {
    if (xmin == xmax) {
      xmin -= 0.5;
      xmax += 0.5;
    }
    if (ymin == ymax) {
      ymin -= 0.5;
      ymax += 0.5;
    }
    const double dx = 0.05 * (xmax - xmin);
    const double dy = 0.05 * (ymax - ymin);
    xmin -= dx;
    xmax += dx;
    ymin -= dy;
    ymax += dy;
  }

  double px(double x) const {
    return kLeft + (x - xmin) / (xmax - xmin) * (kRight - kLeft);
  }

  double py(double y) const {
    return kBottom - (y - ymin) / (ymax - ymin) * (kBottom - kTop);
  }
};

Frame fit_frame(const std::vector<PlotSeries>& series) {
  Frame frame;
  bool seeded = false;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw ConfigError("plot series '" + s.label +
                        "' has mismatched x and y sizes");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!seeded) {
        frame.xmin = frame.xmax = s.x[i];
        frame.ymin = frame.ymax = s.y[i];
        seeded = true;
      } else {
        frame.include(s.x[i], s.y[i]);
      }
    }
  }
  if (!seeded) {
    throw ConfigError("plot has no points");
  }
  frame.pad();
  return frame;
}

void open_document(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << (kWidth / 2)
      << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape(title) << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& frame,
               const std::string& x_label, const std::string& y_label) {
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << (kRight - kLeft) << "\" height=\"" << (kBottom - kTop)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = frame.xmin + (frame.xmax - frame.xmin) * t / 4.0;
    const double fy = frame.ymin + (frame.ymax - frame.ymin) * t / 4.0;
    const double gx = frame.px(fx);
    const double gy = frame.py(fy);
    out << "<line x1=\"" << gx << "\" y1=\"" << kBottom << "\" x2=\"" << gx
        << "\" y2=\"" << (kBottom + 5) << "\" stroke=\"#333\"/>\n"
        << "<text x=\"" << gx << "\" y=\"" << (kBottom + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(fx) << "</text>\n"
        << "<line x1=\"" << (kLeft - 5) << "\" y1=\"" << gy << "\" x2=\""
        << kLeft << "\" y2=\"" << gy << "\" stroke=\"#333\"/>\n"
        << "<text x=\"" << (kLeft - 8) << "\" y=\"" << (gy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(fy) << "</text>\n";
  }
  out << "<text x=\"" << ((kLeft + kRight) / 2) << "\" y=\""
      << (kBottom + 42)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << escape(x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << ((kTop + kBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << ((kTop + kBottom) / 2) << ")\">" << escape(y_label) << "</text>\n";
}

void draw_legend(std::ostringstream& out,
                 const std::vector<PlotSeries>& series) {
  double y = kTop + 14;
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].label.empty()) {
      continue;
    }
    const char* color = kPalette[s % kPaletteSize];
    out << "<rect x=\"" << (kRight - 150) << "\" y=\"" << (y - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n"
        << "<text x=\"" << (kRight - 135) << "\" y=\"" << y
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(series[s].label) << "</text>\n";
    y += 16;
  }
}

}  // namespace

std::string svg_scatter(const std::string& title, const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<PlotSeries>& series,
                        bool identity_line) {
  const Frame frame = fit_frame(series);
  std::ostringstream out;
  open_document(out, title);
  draw_axes(out, frame, x_label, y_label);
  if (identity_line) {
    const double lo = std::max(frame.xmin, frame.ymin);
    const double hi = std::min(frame.xmax, frame.ymax);
    if (hi > lo) {
      out << "<line x1=\"" << frame.px(lo) << "\" y1=\"" << frame.py(lo)
          << "\" x2=\"" << frame.px(hi) << "\" y2=\"" << frame.py(hi)
          << "\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";
    }
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      out << "<circle cx=\"" << frame.px(series[s].x[i]) << "\" cy=\""
          << frame.py(series[s].y[i]) << "\" r=\"2.5\" fill=\"" << color
          << "\" fill-opacity=\"0.6\"/>\n";
    }
  }
  draw_legend(out, series);
  out << "</svg>\n";
  return out.str();
}

std::string svg_lines(const std::string& title, const std::string& x_label,
                      const std::string& y_label,
                      const std::vector<PlotSeries>& series) {
  const Frame frame = fit_frame(series);
  std::ostringstream out;
  open_document(out, title);
  draw_axes(out, frame, x_label, y_label);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      out << frame.px(series[s].x[i]) << "," << frame.py(series[s].y[i])
          << " ";
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      out << "<circle cx=\"" << frame.px(series[s].x[i]) << "\" cy=\""
          << frame.py(series[s].y[i]) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
  }
  draw_legend(out, series);
  out << "</svg>\n";
  return out.str();
}

std::string svg_histogram(const std::string& title, const std::string& x_label,
                          const BeliefHistogram& histogram) {
  if (histogram.counts.empty() ||
      histogram.edges.size() != histogram.counts.size() + 1) {
    throw ConfigError("svg_histogram: malformed histogram");
  }
  Frame frame;
  frame.xmin = histogram.edges.front();
  frame.xmax = histogram.edges.back();
  frame.ymin = 0.0;
  frame.ymax = static_cast<double>(
      *std::max_element(histogram.counts.begin(), histogram.counts.end()));
  if (frame.ymax == 0.0) {
    frame.ymax = 1.0;
  }
  frame.pad();
  std::ostringstream out;
  open_document(out, title);
  draw_axes(out, frame, x_label, "count");
  for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
    const double x0 = frame.px(histogram.edges[b]);
    const double x1 = frame.px(histogram.edges[b + 1]);
    const double y0 = frame.py(static_cast<double>(histogram.counts[b]));
    out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\""
        << (x1 - x0) << "\" height=\"" << (frame.py(0.0) - y0)
        << "\" fill=\"#4477aa\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_heatmap(const std::string& title, const std::string& x_label,
                        const std::string& y_label,
                        const std::vector<double>& x_ticks,
                        const std::vector<double>& y_ticks,
                        const std::vector<std::vector<double>>& values) {
  if (values.size() != y_ticks.size()) {
    throw ConfigError("svg_heatmap: row count does not match y ticks");
  }
  for (const auto& row : values) {
    if (row.size() != x_ticks.size()) {
      throw ConfigError("svg_heatmap: column count does not match x ticks");
    }
  }
  if (x_ticks.empty() || y_ticks.empty()) {
    throw ConfigError("svg_heatmap: empty grid");
  }
  double lo = values[0][0];
  double hi = values[0][0];
  for (const auto& row : values) {
    for (const double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == lo) {
    hi = lo + 1.0;
  }

  std::ostringstream out;
  open_document(out, title);
  const double cell_w = (kRight - kLeft) / static_cast<double>(x_ticks.size());
  const double cell_h = (kBottom - kTop) / static_cast<double>(y_ticks.size());
  for (std::size_t r = 0; r < y_ticks.size(); ++r) {
    for (std::size_t c = 0; c < x_ticks.size(); ++c) {
      const double f = (values[r][c] - lo) / (hi - lo);
      // Blue for low values through to red for high ones.
      const int red = static_cast<int>(std::lround(68 + f * (204 - 68)));
      const int green = static_cast<int>(std::lround(119 + f * (51 - 119)));
      const int blue = static_cast<int>(std::lround(170 + f * (17 - 170)));
      const double x = kLeft + cell_w * static_cast<double>(c);
      const double y = kBottom - cell_h * static_cast<double>(r + 1);
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w
          << "\" height=\"" << cell_h << "\" fill=\"rgb(" << red << ","
          << green << "," << blue << ")\"/>\n"
          << "<text x=\"" << (x + cell_w / 2) << "\" y=\""
          << (y + cell_h / 2 + 4)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"12\" fill=\"white\">"
          << num(values[r][c]) << "</text>\n";
    }
  }
  for (std::size_t c = 0; c < x_ticks.size(); ++c) {
    out << "<text x=\"" << (kLeft + cell_w * (static_cast<double>(c) + 0.5))
        << "\" y=\"" << (kBottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << num(x_ticks[c]) << "</text>\n";
  }
  for (std::size_t r = 0; r < y_ticks.size(); ++r) {
    out << "<text x=\"" << (kLeft - 8) << "\" y=\""
        << (kBottom - cell_h * (static_cast<double>(r) + 0.5) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << num(y_ticks[r]) << "</text>\n";
  }
  out << "<text x=\"" << ((kLeft + kRight) / 2) << "\" y=\"" << (kBottom + 42)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << escape(x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << ((kTop + kBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 "
      << ((kTop + kBottom) / 2) << ")\">" << escape(y_label) << "</text>\n"
      << "</svg>\n";
  return out.str();
}

}  // namespace opinet
