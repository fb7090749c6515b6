#include "pu/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pu {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1-2-5 ladder tick step
double nice_step(double range, int target_ticks) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step = 10.0;
  if (frac <= 1.0) step = 1.0;
  else if (frac <= 2.0) step = 2.0;
  else if (frac <= 5.0) step = 5.0;
  return step * mag;
}

}  // namespace

void SvgLineChart::write(const std::string& path) const {
  if (series.empty()) throw std::invalid_argument("svg: no series to plot");

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("svg: series length mismatch");
    for (double v : s.x) { x_min = std::min(x_min, v); x_max = std::max(x_max, v); }
    for (double v : s.y) { y_min = std::min(y_min, v); y_max = std::max(y_max, v); }
  }
  if (!(x_max > x_min)) { x_min -= 0.5; x_max += 0.5; }
  if (!(y_max > y_min)) { y_min -= 0.5; y_max += 0.5; }
  // keep the y=0 risk floor visible when curves come near it
  if (y_min > 0.0 && y_min < 0.25 * (y_max - y_min)) y_min = 0.0;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double ml = 70, mr = 160, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](double x) { return ml + pw * (x - x_min) / (x_max - x_min); };
  auto sy = [&](double y) { return mt + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">"
        << title << "</text>\n";

  const double x_step = nice_step(x_max - x_min, 6);
  const double y_step = nice_step(y_max - y_min, 6);
  out << "<g font-size=\"11\" fill=\"#333\">\n";
  for (double t = std::ceil(x_min / x_step) * x_step; t <= x_max + 1e-12; t += x_step) {
    out << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << mt << "\" x2=\"" << num(sx(t)) << "\" y2=\""
        << mt + ph << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << num(sx(t)) << "\" y=\"" << mt + ph + 16
        << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (double t = std::ceil(y_min / y_step) * y_step; t <= y_max + 1e-12; t += y_step) {
    out << "<line x1=\"" << ml << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << ml + pw << "\" y2=\""
        << num(sy(t)) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << num(sy(t) + 4)
        << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  out << "</g>\n";

  if (y_min < 0.0 && y_max > 0.0)
    out << "<line x1=\"" << ml << "\" y1=\"" << num(sy(0.0)) << "\" x2=\"" << ml + pw << "\" y2=\""
        << num(sy(0.0)) << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";

  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << num(sx(s.x[i])) << "," << num(sy(s.y[i])) << " ";
    out << "\"/>\n";
  }

  double ly = mt + 12;
  for (const auto& s : series) {
    out << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << ml + pw + 40
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    out << "<text x=\"" << ml + pw + 46 << "\" y=\"" << num(ly) << "\" font-size=\"11\">" << s.name
        << "</text>\n";
    ly += 18;
  }

  if (!x_label.empty())
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"12\" text-anchor=\"middle\">" << x_label << "</text>\n";
  if (!y_label.empty())
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << mt + ph / 2
        << ")\">" << y_label << "</text>\n";
  out << "</svg>\n";
}

}  // namespace pu
