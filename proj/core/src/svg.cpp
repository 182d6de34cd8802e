#include "siqs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace siqs::svg {

namespace {

constexpr double kWidth = 480;
constexpr double kHeight = 360;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 30;
constexpr double kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '&': r += "&amp;"; break;
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      default: r += c;
    }
  }
  return r;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void open(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\">" << escape(title) << "</text>\n";
}

void axes(std::ostream& out, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  const double bx = kHeight - kBottom;
  out << "<line x1=\"" << kLeft << "\" y1=\"" << bx << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << bx
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << bx
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4;
    const double yv = f.y0 + (f.y1 - f.y0) * k / 4;
    out << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << bx + 15 << "\" text-anchor=\"middle\">" << num(xv)
        << "</text>\n";
    out << "<text x=\"" << kLeft - 5 << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  out << "<text transform=\"translate(14," << (kTop + bx) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(ylabel) << "</text>\n";
}

}  // namespace

void line_plot(std::ostream& out, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series,
               std::optional<double> vertical_marker) {
  Frame f{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(), 0.0,
          std::numeric_limits<double>::lowest()};
  for (const auto& s : series) {
    for (double x : s.x) f.x0 = std::min(f.x0, x), f.x1 = std::max(f.x1, x);
    for (double y : s.y) f.y0 = std::min(f.y0, y), f.y1 = std::max(f.y1, y);
  }
  if (!(f.x1 > f.x0)) f.x0 = 0, f.x1 = 1;
  if (!(f.y1 > f.y0)) f.y1 = f.y0 + 1;

  open(out, title);
  axes(out, f, xlabel, ylabel);
  if (vertical_marker) {
    const double x = f.px(*vertical_marker);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << kTop << "\" x2=\"" << num(x) << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"grey\" stroke-dasharray=\"4,3\"/>\n";
  }
  std::size_t k = 0;
  for (const auto& s : series) {
    const char* colour = kPalette[k % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\"";
    if (s.dashed) out << " stroke-dasharray=\"5,3\"";
    out << " points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      out << (i ? " " : "") << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kRight - 5 << "\" y=\"" << kTop + 14 * (k + 1)
        << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << escape(s.label) << "</text>\n";
    ++k;
  }
  out << "</svg>\n";
}

void heatmap(std::ostream& out, const std::string& title, const std::string& xlabel,
             const std::string& ylabel, const std::vector<double>& xs, const std::vector<double>& ys,
             const std::vector<std::optional<double>>& values) {
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (const auto& v : values) {
    if (v) lo = std::min(lo, *v), hi = std::max(hi, *v);
  }
  if (!(hi > lo)) hi = lo + 1;

  auto span = [](const std::vector<double>& a) {
    if (a.empty()) return std::pair{0.0, 1.0};
    const double step = a.size() > 1 ? (a.back() - a.front()) / (a.size() - 1) : 1.0;
    return std::pair{a.front() - step / 2, a.back() + step / 2};
  };
  const auto [x0, x1] = span(xs);
  const auto [y0, y1] = span(ys);
  const Frame f{x0, x1, y0, y1};

  open(out, title);
  const double cw = xs.empty() ? 0 : (f.px(x1) - f.px(x0)) / xs.size();
  const double ch = ys.empty() ? 0 : (f.py(y0) - f.py(y1)) / ys.size();
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    for (std::size_t iy = 0; iy < ys.size(); ++iy) {
      const auto& v = values[ix * ys.size() + iy];
      std::string fill = "#cccccc";
      if (v) {
        const double t = std::clamp((*v - lo) / (hi - lo), 0.0, 1.0);
        char buf[16];
        const int g = static_cast<int>(std::lround(255 * (1 - t)));
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", 255 - static_cast<int>(std::lround(80 * t)), g, g);
        fill = buf;
      }
      out << "<rect x=\"" << num(kLeft + ix * cw) << "\" y=\"" << num(f.py(y0) - (iy + 1) * ch) << "\" width=\""
          << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  axes(out, f, xlabel, ylabel);
  out << "<text x=\"" << kWidth - kRight << "\" y=\"" << kTop - 4 << "\" text-anchor=\"end\">range "
      << num(lo) << " .. " << num(hi) << "</text>\n";
  out << "</svg>\n";
}

}  // namespace siqs::svg
