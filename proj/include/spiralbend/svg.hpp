#pragma once

#include "spiralbend/annulus_embed.hpp"
#include "spiralbend/bending.hpp"
#include "spiralbend/polygon_cover.hpp"

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace spiralbend {

namespace detail {

// Fixed-precision coordinates keep the output byte-stable.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct Canvas {
  double xmin, xmax, ymin, ymax;
  double size = 480.0, pad = 20.0;

  double sx(double x) const { return pad + (x - xmin) / (xmax - xmin) * size; }
  double sy(double y) const { return pad + (ymax - y) / (ymax - ymin) * size; }

  std::string polyline(const std::vector<Point2>& pts, const std::string& stroke, bool closed,
                       const std::string& extra = "") const {
    std::ostringstream o;
    o << "  <" << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << stroke << "\"" << extra
      << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) o << (i ? " " : "") << fmt(sx(pts[i].x)) << "," << fmt(sy(pts[i].y));
    o << "\"/>\n";
    return o.str();
  }

  std::string open(const std::string& title) const {
    const std::string w = fmt(size + 2 * pad);
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           w + "\" height=\"" + w + "\" viewBox=\"0 0 " + w + " " + w + "\">\n  <title>" + title + "</title>\n";
  }
};

inline std::vector<Point2> boundary(const Body2& b, double scale, std::size_t n = 720) {
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    const Point2 d{std::cos(t), std::sin(t)};
    pts.push_back((scale / b.gauge(d)) * d);
  }
  return pts;
}

}  // namespace detail

// Quarter picture: body, (1 + omega) body, and the chain P0 R0 P1 ... Pk.
inline std::string polygon_svg(const Body2& body, const CoverPolygon& c) {
  const double s = 1.0 + c.omega;
  const detail::Canvas cv{-0.05, s + 0.05, -0.05, s + 0.05};
  auto quarter = [](std::vector<Point2> v) {
    std::vector<Point2> out;
    for (auto p : v)
      if (p.x >= -1e-12 && p.y >= -1e-12) out.push_back(p);
    return out;
  };
  std::string o = cv.open(body.name() + " cover, k = " + std::to_string(c.k));
  o += cv.polyline({{0, 0}, {s, 0}}, "#999", false);
  o += cv.polyline({{0, 0}, {0, s}}, "#999", false);
  o += cv.polyline(quarter(detail::boundary(body, 1.0, 2880)), "#1f4e99", false);
  o += cv.polyline(quarter(detail::boundary(body, s, 2880)), "#c03030", false, " stroke-dasharray=\"4 3\"");
  o += cv.polyline(c.chain(), "#208040", false);
  for (auto p : c.chain())
    o += "  <circle cx=\"" + detail::fmt(cv.sx(p.x)) + "\" cy=\"" + detail::fmt(cv.sy(p.y)) + "\" r=\"1.5\" fill=\"#208040\"/>\n";
  return o + "</svg>\n";
}

// (|first block|, |second block|) along a radial ray from r/2 to 2R, on a
// log-radius scale so the whole turn fits.
inline std::string bend_svg(const BendingMap& t, std::size_t n = 600) {
  const auto& p = t.params();
  const double lo = p.r.log_value - std::log(2.0), hi = p.R.log_value + std::log(2.0);
  std::vector<Point2> pts;
  for (std::size_t i = 0; i <= n; ++i) {
    const double lg = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    // Plotted radius is the log offset; the direction comes from the map.
    const double tt = std::exp(std::min(lg, 700.0));
    const auto [c, s] = coefficients_at(tt, p);
    const double rad = lg - lo;
    pts.push_back({rad * c, rad * s});
  }
  const double m = hi - lo;
  const detail::Canvas cv{-0.05 * m, 1.05 * m, -0.05 * m, 1.05 * m};
  std::string o = cv.open("bending trace, eps = " + detail::fmt(p.eps) + ", Z = " + p.z.name());
  o += cv.polyline({{0, 0}, {m, 0}}, "#999", false);
  o += cv.polyline({{0, 0}, {0, m}}, "#999", false);
  o += cv.polyline(pts, "#1f4e99", false);
  return o + "</svg>\n";
}

// Bars of ln R_j; bending steps and gaps alternate colours.
inline std::string schedule_svg(const RadiusSchedule& s) {
  const std::size_t m = s.size();
  const double top = s[m].log_value;
  const detail::Canvas cv{0.0, static_cast<double>(m), 0.0, std::max(top, 1.0)};
  std::string o = cv.open("radius schedule, " + std::to_string(m) + " radii");
  std::vector<Point2> pts;
  for (std::size_t j = 1; j <= m; ++j) pts.push_back({static_cast<double>(j - 1) + 0.5, s[j].log_value});
  for (std::size_t j = 1; j < m; ++j)
    o += cv.polyline({pts[j - 1], pts[j]}, j % 2 == 1 ? "#c03030" : "#1f4e99", false);
  for (auto p : pts)
    o += "  <circle cx=\"" + detail::fmt(cv.sx(p.x)) + "\" cy=\"" + detail::fmt(cv.sy(p.y)) + "\" r=\"2\" fill=\"#333\"/>\n";
  return o + "</svg>\n";
}

}  // namespace spiralbend
