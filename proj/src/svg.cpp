#include "gvm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gvm {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

// Round tick positions: about n steps spanning [lo, hi] at a 1/2/5 pitch.
std::vector<double> ticks(double lo, double hi, int n) {
  double span = hi - lo;
  double raw = span / n;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 0.5 * step; v += step)
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

void SvgPlot::add_series(std::string name, std::vector<double> x,
                         std::vector<double> y) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("svg.add_series: x and y must be non-empty and equal");
  for (double v : x)
    if (!std::isfinite(v))
      throw std::invalid_argument("svg.add_series: non-finite x value");
  for (double v : y)
    if (!std::isfinite(v))
      throw std::invalid_argument("svg.add_series: non-finite y value");
  series_.push_back({std::move(name), std::move(x), std::move(y)});
}

std::string SvgPlot::render(int width, int height) const {
  if (series_.empty()) throw std::logic_error("svg.render: no series added");
  double x_lo = series_[0].x[0], x_hi = x_lo;
  double y_lo = series_[0].y[0], y_hi = y_lo;
  for (const auto& s : series_) {
    for (double v : s.x) { x_lo = std::min(x_lo, v); x_hi = std::max(x_hi, v); }
    for (double v : s.y) { y_lo = std::min(y_lo, v); y_hi = std::max(y_hi, v); }
  }
  if (x_hi == x_lo) { x_lo -= 0.5; x_hi += 0.5; }
  if (y_hi == y_lo) { y_lo -= 0.5; y_hi += 0.5; }
  double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double ml = 72, mr = 24, mt = 40, mb = 56;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double v) { return ml + (v - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double v) { return mt + (y_hi - v) / (y_hi - y_lo) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2.0 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << escape(title_) << "</text>\n";

  for (double t : ticks(x_lo, x_hi, 6)) {
    double x = px(t);
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(t) << "</text>\n";
  }
  for (double t : ticks(y_lo, y_hi, 6)) {
    double y = py(t);
    out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(ml + pw) << "\" y2=\"" << fmt(y) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(t) << "</text>\n";
  }
  out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#404040\"/>\n";
  out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(height - 14.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape(x_label_) << "</text>\n";
  out << "<text x=\"16\" y=\"" << fmt(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 "
      << fmt(mt + ph / 2) << ")\">" << escape(y_label_) << "</text>\n";

  for (std::size_t i = 0; i < series_.size(); ++i) {
    const auto& s = series_[i];
    const char* color = kPalette[i % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (k) out << ' ';
      out << fmt(px(s.x[k])) << ',' << fmt(py(s.y[k]));
    }
    out << "\"/>\n";
    double ly = mt + 16.0 + 16.0 * static_cast<double>(i);
    out << "<line x1=\"" << fmt(ml + pw - 150) << "\" y1=\"" << fmt(ly - 4)
        << "\" x2=\"" << fmt(ml + pw - 130) << "\" y2=\"" << fmt(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(ml + pw - 124) << "\" y=\"" << fmt(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.name)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void SvgPlot::save(const std::string& path, int width, int height) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg.save: cannot open \"" + path + "\"");
  out << render(width, height);
  if (!out) throw std::runtime_error("svg.save: failed writing \"" + path + "\"");
}

}  // namespace gvm
