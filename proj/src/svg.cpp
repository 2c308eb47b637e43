#include "dirac/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dirac {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string phase_portrait_svg(const TrajectoryRecord& record, double radius, const std::string& title) {
  constexpr double size = 480.0;
  constexpr double pad = 30.0;
  double extent = 1.15 * radius;
  for (const auto& s : record.states) {
    if (s.size() < 2) continue;
    extent = std::max({extent, 1.05 * std::abs(s[0]), 1.05 * std::abs(s[1])});
  }
  const double scale = (size / 2.0 - pad) / extent;
  const double c = size / 2.0;
  auto sx = [&](double q) { return c + q * scale; };
  auto sy = [&](double p) { return c - p * scale; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << c << "\" x2=\"" << size - pad << "\" y2=\"" << c
     << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << c << "\" y1=\"" << pad << "\" x2=\"" << c << "\" y2=\"" << size - pad
     << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << size - pad << "\" y=\"" << c - 6 << "\" font-size=\"12\">q</text>\n";
  os << "<text x=\"" << c + 6 << "\" y=\"" << pad << "\" font-size=\"12\">p</text>\n";
  os << "<circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"" << fmt(radius * scale)
     << "\" fill=\"none\" stroke=\"#c33\" stroke-dasharray=\"4 3\" stroke-width=\"1.5\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#236\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < record.states.size(); ++i) {
    const auto& s = record.states[i];
    if (s.size() < 2) continue;
    if (i) os << ' ';
    os << fmt(sx(s[0])) << ',' << fmt(sy(s[1]));
  }
  os << "\"/>\n";
  os << "<text x=\"" << pad << "\" y=\"" << pad / 2 + 6 << "\" font-size=\"13\">" << xml_escape(title)
     << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace dirac
