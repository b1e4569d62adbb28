#include "prlab/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace prlab {

namespace {

std::string rgb(double r, double g, double b) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(255 * r)),
                static_cast<int>(std::lround(255 * g)), static_cast<int>(std::lround(255 * b)));
  return buf;
}

// Light pastel per cell, keyed on the piece so equal pieces share a color.
std::string cell_fill(const AffinePiece& p) {
  const double h = std::fmod(std::abs(0.37 * p.b.x() + 0.61 * p.b.y() + 0.23 * p.A(0, 1)) * 2.3, 1.0);
  const double r = 0.5 + 0.5 * std::cos(6.2831853 * h);
  const double g = 0.5 + 0.5 * std::cos(6.2831853 * (h - 1.0 / 3.0));
  const double b = 0.5 + 0.5 * std::cos(6.2831853 * (h - 2.0 / 3.0));
  return rgb(0.8 + 0.2 * r, 0.8 + 0.2 * g, 0.8 + 0.2 * b);
}

}  // namespace

std::string render_svg(const PiecewiseAffine& u, const SvgStyle& style) {
  const auto& dom = u.partition().domain().vertices();
  double x0 = dom[0].x(), x1 = x0, y0 = dom[0].y(), y1 = y0;
  for (const auto& p : dom) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  const double span = std::max(x1 - x0, y1 - y0);
  const double inner = style.width - 2.0 * style.margin;
  const double s = inner / span;
  const int height = static_cast<int>(std::lround((y1 - y0) * s + 2.0 * style.margin));
  auto X = [&](const Point2& p) { return style.margin + (p.x() - x0) * s; };
  auto Y = [&](const Point2& p) { return height - style.margin - (p.y() - y0) * s; };

  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << style.width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto path = [&](const std::vector<Point2>& pts) {
    std::ostringstream d;
    d.precision(6);
    for (std::size_t k = 0; k < pts.size(); ++k) d << (k ? " L " : "M ") << X(pts[k]) << ' ' << Y(pts[k]);
    d << " Z";
    return d.str();
  };
  out << "<g id=\"cells\" stroke=\"#999999\" stroke-width=\"0.5\">\n";
  for (std::size_t k = 0; k < u.partition().num_cells(); ++k) {
    const std::string fill = style.shade_cells ? cell_fill(u.piece(k)) : std::string("none");
    out << "<path d=\"" << path(u.partition().cells()[k].vertices()) << "\" fill=\"" << fill << "\"/>\n";
  }
  out << "</g>\n<path d=\"" << path(dom) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  out << "<g id=\"jumps\" stroke-linecap=\"round\">\n";
  const double tick = 0.03 * span;
  for (const auto& seg : jump_segments(u)) {
    const double m = std::max({seg.jump(0.0).norm(), seg.jump(0.5 * seg.length).norm(), seg.jump(seg.length).norm()});
    if (!(m > style.threshold)) continue;
    const double t = std::clamp((std::log10(m / style.threshold)) / 14.0, 0.0, 1.0);
    const double w = 0.5 + 5.5 * t;
    out << "<line x1=\"" << X(seg.a) << "\" y1=\"" << Y(seg.a) << "\" x2=\"" << X(seg.b) << "\" y2=\"" << Y(seg.b)
        << "\" stroke=\"" << rgb(t, 0.15, 1.0 - t) << "\" stroke-width=\"" << w << "\"/>\n";
    if (style.normals) {
      const Point2 c = seg.point(0.5 * seg.length), e = c + tick * seg.normal;
      out << "<line class=\"normal\" x1=\"" << X(c) << "\" y1=\"" << Y(c) << "\" x2=\"" << X(e) << "\" y2=\"" << Y(e)
          << "\" stroke=\"black\" stroke-width=\"0.75\"/>\n";
    }
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace prlab
