#include "fedsleep/exp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fedsleep::exp {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Frame {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  double sx(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double sy(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

Frame fit(std::span<const Series> series) {
  Frame f{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const auto& s : series) {
    for (double x : s.x) {
      if (std::isfinite(x)) f.x0 = std::min(f.x0, x), f.x1 = std::max(f.x1, x);
    }
    for (double y : s.y) {
      if (std::isfinite(y)) f.y0 = std::min(f.y0, y), f.y1 = std::max(f.y1, y);
    }
  }
  if (!std::isfinite(f.x0)) f = {0, 1, 0, 1};
  if (f.x1 - f.x0 <= 0) f.x0 -= 0.5, f.x1 += 0.5;
  if (f.y1 - f.y0 <= 0) f.y0 -= 0.5, f.y1 += 0.5;
  const double pad = 0.05 * (f.y1 - f.y0);
  f.y0 -= pad;
  f.y1 += pad;
  return f;
}

void header(std::ostringstream& o, const Frame& f, const std::string& title, const std::string& xl,
            const std::string& yl) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << px(kWidth / 2 - kRight / 2 + kLeft / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << esc(title) << "</text>\n";
  const double bx0 = kLeft, bx1 = kWidth - kRight, by0 = kTop, by1 = kHeight - kBottom;
  o << "<rect x=\"" << bx0 << "\" y=\"" << by0 << "\" width=\"" << bx1 - bx0 << "\" height=\"" << by1 - by0
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    o << "<text x=\"" << px(f.sx(xv)) << "\" y=\"" << px(by1 + 15) << "\" text-anchor=\"middle\">" << num(xv)
      << "</text>\n";
    o << "<text x=\"" << px(bx0 - 5) << "\" y=\"" << px(f.sy(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
      << "</text>\n";
    o << "<line x1=\"" << px(bx0) << "\" x2=\"" << px(bx1) << "\" y1=\"" << px(f.sy(yv)) << "\" y2=\""
      << px(f.sy(yv)) << "\" stroke=\"#ddd\"/>\n";
  }
  o << "<text x=\"" << px((bx0 + bx1) / 2) << "\" y=\"" << px(kHeight - 12) << "\" text-anchor=\"middle\">"
    << esc(xl) << "</text>\n";
  o << "<text transform=\"translate(16," << px((by0 + by1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << esc(yl) << "</text>\n";
}

void legend(std::ostringstream& o, std::span<const Series> series) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 10 + 16.0 * i;
    const char* c = kPalette[i % std::size(kPalette)];
    o << "<rect x=\"" << px(kWidth - kRight + 10) << "\" y=\"" << px(y - 8) << "\" width=\"10\" height=\"10\" fill=\""
      << c << "\"/>\n";
    o << "<text x=\"" << px(kWidth - kRight + 25) << "\" y=\"" << px(y + 1) << "\">" << esc(series[i].label)
      << "</text>\n";
  }
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      std::span<const Series> series) {
  std::ostringstream o;
  const Frame f = fit(series);
  header(o, f, title, x_label, y_label);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    o << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[i % std::size(kPalette)]
      << "\" points=\"";
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (std::isfinite(s.x[k]) && std::isfinite(s.y[k])) o << px(f.sx(s.x[k])) << ',' << px(f.sy(s.y[k])) << ' ';
    }
    o << "\"/>\n";
  }
  legend(o, series);
  o << "</svg>\n";
  return o.str();
}

std::string scatter_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                         std::span<const Series> series) {
  std::ostringstream o;
  const Frame f = fit(series);
  header(o, f, title, x_label, y_label);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      o << "<circle r=\"4\" cx=\"" << px(f.sx(s.x[k])) << "\" cy=\"" << px(f.sy(s.y[k])) << "\" fill=\""
        << kPalette[i % std::size(kPalette)] << "\"/>\n";
    }
  }
  legend(o, series);
  o << "</svg>\n";
  return o.str();
}

}  // namespace fedsleep::exp
