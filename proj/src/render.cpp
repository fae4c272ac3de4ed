#include "pks/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pks/faces.hpp"

namespace pks {

namespace {

std::string color(double t) {
  // Five-stop blue → green → yellow ramp, t in [0, 1].
  static const std::array<std::array<double, 3>, 5> stops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * 4;
  const auto i = std::min<std::size_t>(3, static_cast<std::size_t>(t));
  const double f = t - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k)
    rgb[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace

std::string render_svg(const Drawing& d, const RenderStyle& st) {
  const double k = st.pixels_per_unit, margin = 10;
  const double w = d.a * k + 2 * margin, h = d.b * k + 2 * margin;
  const auto X = [&](double x) { return margin + x * k; };
  const auto Y = [&](double y) { return margin + (d.b - y) * k; };  // north up

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect x=\"" << X(0) << "\" y=\"" << Y(d.b) << "\" width=\"" << d.a * k << "\" height=\""
     << d.b * k << "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";

  if (st.mode == RenderMode::Potential) {
    const PotentialMap pm = potential(d);
    double lo = 0, hi = 0;
    for (double v : pm.value) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    os << "<g class=\"faces\" stroke=\"none\">\n";
    for (std::size_t f = 0; f < pm.map.faces.size(); ++f) {
      const double t = hi > lo ? (pm.value[f] - lo) / (hi - lo) : 0.5;
      os << "<path fill-rule=\"evenodd\" fill=\"" << color(t) << "\" data-potential=\""
         << pm.value[f] << "\" d=\"";
      for (const auto& cycle : pm.map.faces[f].boundary) {
        for (std::size_t i = 0; i < cycle.size(); ++i)
          os << (i ? " L" : "M") << X(cycle[i].x) << " " << Y(cycle[i].y);
        os << " Z ";
      }
      os << "\"/>\n";
    }
    os << "</g>\n";
  }

  os << "<g class=\"lines\" stroke-linecap=\"square\">\n";
  for (const Segment& s : d.segments) {
    const double v = d.physical(s.intensity);
    const char* stroke = v > 0 ? "red" : v < 0 ? "blue" : "gray";
    double width = std::clamp(std::abs(v) * st.width_per_unit, st.min_width, st.max_width);
    if (st.mode == RenderMode::Potential) width = st.min_width;
    os << "<line x1=\"" << X(s.lo.x) << "\" y1=\"" << Y(s.lo.y) << "\" x2=\"" << X(s.hi.x)
       << "\" y2=\"" << Y(s.hi.y) << "\" stroke=\"" << (st.mode == RenderMode::Potential ? "black" : stroke)
       << "\" stroke-width=\"" << width << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace pks
