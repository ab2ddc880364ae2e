/*
 Copyright 2026 The slipwalk Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "slipwalk/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "slipwalk/io.hpp"

namespace slipwalk::svg {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
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

/// Tick spacing from {1, 2, 5} x 10^k giving about five intervals.
double nice_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finalize() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
      const double pad = std::max(1e-3, std::abs(lo) * 0.1);
      lo -= pad;
      hi += pad;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

void render_panel(std::string& out, const Panel& p, double ox, double oy, int w, int h) {
  const double ml = 62, mr = 14, mt = 28, mb = 44;
  const double pw = w - ml - mr, ph = h - mt - mb;
  Range rx, ry;
  for (const auto& s : p.series) {
    for (double v : s.x) rx.add(v);
    for (double v : s.y) ry.add(v);
  }
  rx.finalize();
  ry.finalize();
  auto X = [&](double v) { return ox + ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto Y = [&](double v) { return oy + mt + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

  out += "<rect x=\"" + fixed(ox + ml) + "\" y=\"" + fixed(oy + mt) + "\" width=\"" + fixed(pw) +
         "\" height=\"" + fixed(ph) + "\" fill=\"white\" stroke=\"#444\"/>\n";
  out += "<text x=\"" + fixed(ox + ml + pw / 2) + "\" y=\"" + fixed(oy + 18) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + escape(p.title) + "</text>\n";
  out += "<text x=\"" + fixed(ox + ml + pw / 2) + "\" y=\"" + fixed(oy + h - 8) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + escape(p.xlabel) + "</text>\n";
  out += "<text x=\"" + fixed(ox + 14) + "\" y=\"" + fixed(oy + mt + ph / 2) +
         "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 " + fixed(ox + 14) +
         " " + fixed(oy + mt + ph / 2) + ")\">" + escape(p.ylabel) + "</text>\n";

  const double sx = nice_step(rx.hi - rx.lo), sy = nice_step(ry.hi - ry.lo);
  for (double v = std::ceil(rx.lo / sx) * sx; v <= rx.hi; v += sx) {
    out += "<line x1=\"" + fixed(X(v)) + "\" y1=\"" + fixed(oy + mt + ph) + "\" x2=\"" +
           fixed(X(v)) + "\" y2=\"" + fixed(oy + mt) + "\" stroke=\"#ddd\"/>\n";
    out += "<text x=\"" + fixed(X(v)) + "\" y=\"" + fixed(oy + mt + ph + 14) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + tick_label(v) + "</text>\n";
  }
  for (double v = std::ceil(ry.lo / sy) * sy; v <= ry.hi; v += sy) {
    out += "<line x1=\"" + fixed(ox + ml) + "\" y1=\"" + fixed(Y(v)) + "\" x2=\"" +
           fixed(ox + ml + pw) + "\" y2=\"" + fixed(Y(v)) + "\" stroke=\"#ddd\"/>\n";
    out += "<text x=\"" + fixed(ox + ml - 4) + "\" y=\"" + fixed(Y(v) + 3) +
           "\" text-anchor=\"end\" font-size=\"10\">" + tick_label(v) + "</text>\n";
  }

  double legend_y = oy + mt + 14;
  for (const auto& s : p.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.kind == Series::Kind::Points) {
      for (std::size_t i = 0; i < n; ++i)
        out += "<circle cx=\"" + fixed(X(s.x[i])) + "\" cy=\"" + fixed(Y(s.y[i])) +
               "\" r=\"2\" fill=\"" + s.color + "\"/>\n";
    } else if (n > 0) {
      std::string pts;
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        if (!pts.empty()) pts += ' ';
        pts += fixed(X(s.x[i])) + "," + fixed(Y(s.y[i]));
      }
      if (s.kind == Series::Kind::Polygon)
        out += "<polygon points=\"" + pts + "\" fill=\"" + s.color +
               "\" fill-opacity=\"0.2\" stroke=\"" + s.color + "\"/>\n";
      else
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.2\"/>\n";
    }
    if (!s.label.empty()) {
      out += "<rect x=\"" + fixed(ox + ml + pw - 96) + "\" y=\"" + fixed(legend_y - 8) +
             "\" width=\"10\" height=\"8\" fill=\"" + s.color + "\"/>\n";
      out += "<text x=\"" + fixed(ox + ml + pw - 82) + "\" y=\"" + fixed(legend_y) +
             "\" font-size=\"10\">" + escape(s.label) + "</text>\n";
      legend_y += 13;
    }
  }
}

/// Boundary of the 2D convex hull in angular order (closed by the polygon element).
void hull_polygon(const std::vector<Eigen::VectorXd>& pts, int i, int j, std::vector<double>& xs,
                  std::vector<double>& ys) {
  std::vector<Eigen::VectorXd> proj;
  for (const auto& p : pts) proj.push_back(Eigen::Vector2d(p(i), p(j)));
  std::vector<Eigen::VectorXd> hull = proj.size() > 2 ? convex_hull_vertices(proj) : proj;
  if (hull.empty()) return;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& h : hull) c += h;
  c /= static_cast<double>(hull.size());
  std::sort(hull.begin(), hull.end(), [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });
  for (const auto& h : hull) {
    xs.push_back(h(0));
    ys.push_back(h(1));
  }
}

}  // namespace

std::string render(const std::vector<Panel>& panels, const std::string& title, int panel_width,
                   int panel_height) {
  const int top = 30;
  const int W = panel_width * static_cast<int>(std::max<std::size_t>(1, panels.size()));
  const int H = panel_height + top;
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
         "\" height=\"" + std::to_string(H) + "\" viewBox=\"0 0 " + std::to_string(W) + " " +
         std::to_string(H) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#fafafa\"/>\n";
  out += "<text x=\"" + fixed(W / 2.0) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(title) + "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    render_panel(out, panels[i], static_cast<double>(i) * panel_width, top, panel_width,
                 panel_height);
  out += "</svg>\n";
  return out;
}

std::string phase_portraits(const std::vector<StepTrace>& traces, const std::string& title) {
  Panel px{"sagittal", "x [m]", "xdot [m/s]", {}};
  Panel py{"lateral", "y [m]", "ydot [m/s]", {}};
  Series sx, sy;
  sy.color = "#d62728";
  for (const auto& tr : traces) {
    for (const auto& s : tr.samples) {
      sx.x.push_back(s.P.x());
      sx.y.push_back(s.Pdot.x());
      sy.x.push_back(s.P.y());
      sy.y.push_back(s.Pdot.y());
    }
  }
  px.series.push_back(std::move(sx));
  py.series.push_back(std::move(sy));
  return render({px, py}, title);
}

std::string time_series(const std::vector<StepTrace>& traces, const std::string& title) {
  Panel ph{"mass height", "t [s]", "z [m]", {}};
  Panel pf{"vertical forces", "t [s]", "Fz [N]", {}};
  Series z, fl, fr;
  fl.label = "left";
  fr.label = "right";
  fr.color = "#d62728";
  for (const auto& tr : traces) {
    for (const auto& s : tr.samples) {
      z.x.push_back(s.t);
      z.y.push_back(s.P.z());
      fl.x.push_back(s.t);
      fl.y.push_back(s.F_z[0]);
      fr.x.push_back(s.t);
      fr.y.push_back(s.F_z[1]);
    }
  }
  ph.series.push_back(std::move(z));
  pf.series.push_back(std::move(fl));
  pf.series.push_back(std::move(fr));
  return render({ph, pf}, title);
}

std::string hull_plot(const PlaneAnalysis& a, const std::string& title) {
  const std::vector<std::string> names = io::plane_components(a.dim);
  std::vector<Panel> panels;
  for (int i = 0; i < a.dim; ++i) {
    for (int j = i + 1; j < a.dim; ++j) {
      Panel p{names[i] + " vs " + names[j], "e_" + names[i], "e_" + names[j], {}};
      Series E, W, e;
      E.kind = W.kind = Series::Kind::Polygon;
      e.kind = Series::Kind::Points;
      E.color = "#1f77b4";
      E.label = "E";
      W.color = "#2ca02c";
      W.label = "W";
      e.color = "#d62728";
      e.label = "e_k";
      hull_polygon(a.E.vertices, i, j, E.x, E.y);
      hull_polygon(a.W.vertices, i, j, W.x, W.y);
      for (const auto& v : a.e) {
        e.x.push_back(v(i));
        e.y.push_back(v(j));
      }
      p.series = {E, W, e};
      panels.push_back(std::move(p));
    }
  }
  return render(panels, title, 360, 320);
}

}  // namespace slipwalk::svg
