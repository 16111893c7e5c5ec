#pragma once

// Standalone SVG 1.1 pictures of a graph: domain cells, edges colored by a
// density, and curve overlays with stroke width proportional to mass.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmod/space.hpp"

namespace pmod {

struct SvgStyle {
  int width = 800;
  int height = 800;
  std::string colormap = "tworamp";  // tworamp | gray | heat
  double max_stroke = 6.0;           // curve stroke width for the heaviest curve
};

namespace detail {

using Rgb = std::array<int, 3>;

inline Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  Rgb c;
  for (int k = 0; k < 3; ++k) c[k] = static_cast<int>(std::lround(a[k] + (b[k] - a[k]) * t));
  return c;
}

// t in [0, 1] -> color. The default runs pale grey to blue, then blue to red.
inline Rgb colormap(const std::string& name, double t) {
  t = std::clamp(t, 0.0, 1.0);
  if (name == "gray") return lerp({230, 230, 230}, {20, 20, 20}, t);
  if (name == "heat")
    return t < 0.5 ? lerp({255, 255, 204}, {253, 141, 60}, 2 * t) : lerp({253, 141, 60}, {189, 0, 38}, 2 * t - 1);
  if (name == "tworamp")
    return t < 0.5 ? lerp({215, 215, 215}, {33, 102, 172}, 2 * t) : lerp({33, 102, 172}, {178, 24, 43}, 2 * t - 1);
  throw std::invalid_argument("unknown colormap \"" + name + "\"");
}

inline std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  return s == "-0.000" ? "0.000" : s;
}

}  // namespace detail

inline std::string render_svg(const MetricGraph& g, const std::optional<DensityField>& density,
                              const CurveMeasure& curves, const SvgStyle& style = {}) {
  if (style.width < 50 || style.height < 50) throw std::invalid_argument("picture must be at least 50x50 pixels");
  detail::colormap(style.colormap, 0.0);
  if (density) require_field_size(g, density->size());
  for (const auto& wp : curves) require_on_graph(g, wp.path);

  double x0 = g.node(0).x, x1 = x0, y0 = g.node(0).y, y1 = y0;
  for (const Node& n : g.nodes()) {
    if (!std::isfinite(n.x) || !std::isfinite(n.y)) throw std::invalid_argument("node without coordinates");
    x0 = std::min(x0, n.x), x1 = std::max(x1, n.x), y0 = std::min(y0, n.y), y1 = std::max(y1, n.y);
  }
  const double legend_w = density ? 70.0 : 0.0;
  const double pad = 20.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double scale = std::min((style.width - 2 * pad - legend_w) / std::max(x1 - x0, span * 1e-3),
                                (style.height - 2 * pad) / std::max(y1 - y0, span * 1e-3));
  auto px = [&](double x) { return detail::num(pad + (x - x0) * scale); };
  auto py = [&](double y) { return detail::num(style.height - pad - (y - y0) * scale); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
         "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
         std::to_string(style.height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" fill=\"#ffffff\"/>\n";

  // Cells present: grey bounding box with the domain cells in white, so
  // removed parts show as grey.
  if (!g.cells().empty()) {
    out += "<g id=\"domain\">\n";
    out += "<rect x=\"" + px(x0) + "\" y=\"" + py(y1) + "\" width=\"" + detail::num((x1 - x0) * scale) +
           "\" height=\"" + detail::num((y1 - y0) * scale) + "\" fill=\"#bdbdbd\"/>\n";
    for (const Cell& c : g.cells()) {
      const Node& ll = g.node(c[0]);
      const Node& ur = g.node(c[2]);
      out += "<rect x=\"" + px(ll.x) + "\" y=\"" + py(ur.y) + "\" width=\"" + detail::num((ur.x - ll.x) * scale) +
             "\" height=\"" + detail::num((ur.y - ll.y) * scale) + "\" fill=\"#ffffff\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n";
    }
    out += "</g>\n";
  }

  double dmax = 0.0;
  if (density)
    for (double v : *density) dmax = std::max(dmax, v);
  out += "<g id=\"edges\" stroke-linecap=\"round\">\n";
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const double t = density && dmax > 0.0 ? (*density)[e] / dmax : 0.0;
    const std::string color = density ? detail::hex(detail::colormap(style.colormap, t)) : "#9e9e9e";
    out += "<line x1=\"" + px(g.node(ed.u).x) + "\" y1=\"" + py(g.node(ed.u).y) + "\" x2=\"" + px(g.node(ed.v).x) +
           "\" y2=\"" + py(g.node(ed.v).y) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
  }
  out += "</g>\n";

  double mmax = 0.0;
  for (const auto& wp : curves) mmax = std::max(mmax, wp.mass);
  if (!curves.empty()) {
    out += "<g id=\"curves\" fill=\"none\" stroke=\"#000000\" stroke-opacity=\"0.6\" stroke-linejoin=\"round\">\n";
    for (const auto& wp : curves) {
      if (!(wp.mass > 0.0)) continue;
      out += "<polyline stroke-width=\"" + detail::num(style.max_stroke * wp.mass / mmax) + "\" points=\"";
      bool first = true;
      for (int v : wp.path.nodes()) {
        if (!first) out += ' ';
        first = false;
        out += px(g.node(v).x) + "," + py(g.node(v).y);
      }
      out += "\"/>\n";
    }
    out += "</g>\n";
  }

  if (density) {
    const double lx = style.width - legend_w + 10.0;
    const double top = pad;
    const double bar_h = style.height - 2 * pad;
    const int steps = 32;
    out += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int k = 0; k < steps; ++k) {
      const double t = 1.0 - (k + 0.5) / steps;
      out += "<rect x=\"" + detail::num(lx) + "\" y=\"" + detail::num(top + k * bar_h / steps) +
             "\" width=\"16\" height=\"" + detail::num(bar_h / steps + 0.5) + "\" fill=\"" +
             detail::hex(detail::colormap(style.colormap, t)) + "\"/>\n";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", dmax);
    out += "<text x=\"" + detail::num(lx + 20) + "\" y=\"" + detail::num(top + 10) + "\">" + buf + "</text>\n";
    out += "<text x=\"" + detail::num(lx + 20) + "\" y=\"" + detail::num(top + bar_h) + "\">0</text>\n";
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace pmod
