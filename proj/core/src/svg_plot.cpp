#include "hoverwing/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hoverwing {

namespace {

const char* kColorCycle[] = {"#1f77b4", "#d62728", "#2ca02c",
                             "#ff7f0e", "#9467bd", "#8c564b"};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double range, int target_ticks) {
  if (range <= 0.0) return 1.0;
  const double raw = range / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double step = r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0;
  return step * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  void pad() {
    if (!valid()) {
      lo = -1.0;
      hi = 1.0;
      return;
    }
    if (hi - lo < 1e-12) {
      lo -= 1.0;
      hi += 1.0;
      return;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

}  // namespace

bool write_svg_plot(const std::string& path, const PlotSpec& spec) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) return false;

  const double ml = 62, mr = 18, mt = 34, mb = 46;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;

  Range rx, ry;
  for (const auto& s : spec.series) {
    for (double v : s.x) rx.add(v);
    for (double v : s.y) ry.add(v);
  }
  for (const auto& a : spec.arrows) {
    rx.add(a.x);
    rx.add(a.x + a.dx);
    ry.add(a.y);
    ry.add(a.y + a.dy);
  }
  rx.pad();
  ry.pad();

  if (spec.equal_aspect) {
    const double sx = (rx.hi - rx.lo) / pw;
    const double sy = (ry.hi - ry.lo) / ph;
    const double s = std::max(sx, sy);
    const double cx = 0.5 * (rx.lo + rx.hi), cy = 0.5 * (ry.lo + ry.hi);
    rx.lo = cx - 0.5 * s * pw;
    rx.hi = cx + 0.5 * s * pw;
    ry.lo = cy - 0.5 * s * ph;
    ry.hi = cy + 0.5 * s * ph;
  }

  auto px = [&](double x) { return ml + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double y) {
    return mt + (ry.hi - y) / (ry.hi - ry.lo) * ph;
  };

  std::fprintf(f,
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
               "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
               spec.width, spec.height, spec.width, spec.height);
  std::fprintf(f,
               "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n"
               "<g font-family=\"sans-serif\" font-size=\"12\">\n",
               spec.width, spec.height);
  std::fprintf(f,
               "<text x=\"%.0f\" y=\"20\" text-anchor=\"middle\" "
               "font-size=\"14\">%s</text>\n",
               ml + pw / 2, xml_escape(spec.title).c_str());

  // Grid and ticks.
  const double xstep = nice_step(rx.hi - rx.lo, 6);
  for (double x = std::ceil(rx.lo / xstep) * xstep; x <= rx.hi + 1e-9;
       x += xstep) {
    std::fprintf(f,
                 "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                 "stroke=\"#dddddd\"/>\n",
                 px(x), mt, px(x), mt + ph);
    std::fprintf(f,
                 "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%g"
                 "</text>\n",
                 px(x), mt + ph + 16, x);
  }
  const double ystep = nice_step(ry.hi - ry.lo, 6);
  for (double y = std::ceil(ry.lo / ystep) * ystep; y <= ry.hi + 1e-9;
       y += ystep) {
    std::fprintf(f,
                 "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                 "stroke=\"#dddddd\"/>\n",
                 ml, py(y), ml + pw, py(y));
    std::fprintf(f,
                 "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%g"
                 "</text>\n",
                 ml - 6, py(y) + 4, y);
  }
  std::fprintf(f,
               "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
               "fill=\"none\" stroke=\"black\"/>\n",
               ml, mt, pw, ph);
  std::fprintf(f,
               "<text x=\"%.0f\" y=\"%.0f\" text-anchor=\"middle\">%s"
               "</text>\n",
               ml + pw / 2, mt + ph + 36, xml_escape(spec.x_label).c_str());
  std::fprintf(f,
               "<text x=\"16\" y=\"%.0f\" text-anchor=\"middle\" "
               "transform=\"rotate(-90 16 %.0f)\">%s</text>\n",
               mt + ph / 2, mt + ph / 2, xml_escape(spec.y_label).c_str());

  // Series, clipped to the frame, decimated to the point budget.
  std::fprintf(f,
               "<clipPath id=\"frame\"><rect x=\"%.1f\" y=\"%.1f\" "
               "width=\"%.1f\" height=\"%.1f\"/></clipPath>\n"
               "<g clip-path=\"url(#frame)\">\n",
               ml, mt, pw, ph);
  int color_i = 0;
  for (const auto& s : spec.series) {
    const std::string color =
        s.color.empty() ? kColorCycle[color_i % 6] : s.color;
    ++color_i;
    const size_t n = std::min(s.x.size(), s.y.size());
    const size_t stride = std::max<size_t>(1, n / spec.max_points);
    std::fprintf(f,
                 "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"%.1f\"%s"
                 " points=\"",
                 color.c_str(), s.width,
                 s.dashed ? " stroke-dasharray=\"6 4\"" : "");
    for (size_t i = 0; i < n; i += stride) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      std::fprintf(f, "%.1f,%.1f ", px(s.x[i]), py(s.y[i]));
    }
    std::fprintf(f, "\"/>\n");
  }
  for (const auto& a : spec.arrows) {
    const double x1 = px(a.x), y1 = py(a.y);
    const double x2 = px(a.x + a.dx), y2 = py(a.y + a.dy);
    const double ang = std::atan2(y2 - y1, x2 - x1);
    const double hl = 5.0;
    std::fprintf(f,
                 "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                 "stroke=\"%s\"/>\n",
                 x1, y1, x2, y2, a.color.c_str());
    std::fprintf(f,
                 "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                 "stroke=\"%s\"/>\n",
                 x2, y2, x2 - hl * std::cos(ang - 0.5),
                 y2 - hl * std::sin(ang - 0.5), a.color.c_str());
    std::fprintf(f,
                 "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                 "stroke=\"%s\"/>\n",
                 x2, y2, x2 - hl * std::cos(ang + 0.5),
                 y2 - hl * std::sin(ang + 0.5), a.color.c_str());
  }
  std::fprintf(f, "</g>\n");

  // Legend.
  color_i = 0;
  double ly = mt + 14;
  for (const auto& s : spec.series) {
    const std::string color =
        s.color.empty() ? kColorCycle[color_i % 6] : s.color;
    ++color_i;
    if (s.label.empty()) continue;
    std::fprintf(f,
                 "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                 "stroke=\"%s\" stroke-width=\"2\"%s/>\n",
                 ml + pw - 150, ly - 4, ml + pw - 126, ly - 4, color.c_str(),
                 s.dashed ? " stroke-dasharray=\"6 4\"" : "");
    std::fprintf(f, "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n", ml + pw - 120,
                 ly, xml_escape(s.label).c_str());
    ly += 16;
  }

  std::fprintf(f, "</g>\n</svg>\n");
  std::fclose(f);
  return true;
}

namespace {

PlotSeries column_series(const std::vector<LogRecord>& recs,
                         double LogRecord::* xf, double LogRecord::* yf,
                         const std::string& label, double scale = 1.0) {
  PlotSeries s;
  s.label = label;
  s.x.reserve(recs.size());
  s.y.reserve(recs.size());
  for (const auto& r : recs) {
    s.x.push_back(r.*xf);
    s.y.push_back(r.*yf * scale);
  }
  return s;
}

}  // namespace

std::vector<std::string> write_standard_plots(
    const std::string& dir, const std::string& stem,
    const std::vector<LogRecord>& records) {
  std::vector<std::string> written;
  if (records.empty()) return written;
  const double r2d = 180.0 / M_PI;
  auto out = [&](const std::string& name) { return dir + "/" + stem + name; };

  {
    PlotSpec p;
    p.title = "Pitch tracking";
    p.x_label = "t [s]";
    p.y_label = "pitch [deg]";
    p.series.push_back(
        column_series(records, &LogRecord::t, &LogRecord::theta, "pitch", r2d));
    auto ref = column_series(records, &LogRecord::t, &LogRecord::theta_ref,
                             "reference", r2d);
    ref.dashed = true;
    p.series.push_back(ref);
    if (write_svg_plot(out("_pitch.svg"), p)) written.push_back(out("_pitch.svg"));
  }
  {
    PlotSpec p;
    p.title = "Roll tracking";
    p.x_label = "t [s]";
    p.y_label = "roll [deg]";
    p.series.push_back(
        column_series(records, &LogRecord::t, &LogRecord::phi, "roll", r2d));
    auto ref = column_series(records, &LogRecord::t, &LogRecord::phi_ref,
                             "reference", r2d);
    ref.dashed = true;
    p.series.push_back(ref);
    if (write_svg_plot(out("_roll.svg"), p)) written.push_back(out("_roll.svg"));
  }
  {
    PlotSpec p;
    p.title = "Actuator commands";
    p.x_label = "t [s]";
    p.y_label = "command [units]";
    p.series.push_back(column_series(records, &LogRecord::t,
                                     &LogRecord::u_cmd_0, "flap left"));
    p.series.push_back(column_series(records, &LogRecord::t,
                                     &LogRecord::u_cmd_1, "flap right"));
    p.series.push_back(column_series(records, &LogRecord::t,
                                     &LogRecord::u_cmd_2, "motor left"));
    p.series.push_back(column_series(records, &LogRecord::t,
                                     &LogRecord::u_cmd_3, "motor right"));
    if (write_svg_plot(out("_inputs.svg"), p)) written.push_back(out("_inputs.svg"));
  }
  {
    PlotSpec p;
    p.title = "NED acceleration vs reference";
    p.x_label = "t [s]";
    p.y_label = "accel [m/s^2]";
    p.series.push_back(
        column_series(records, &LogRecord::t, &LogRecord::acc_f_n, "north"));
    p.series.push_back(
        column_series(records, &LogRecord::t, &LogRecord::acc_f_e, "east"));
    p.series.push_back(
        column_series(records, &LogRecord::t, &LogRecord::acc_f_d, "down"));
    auto rn = column_series(records, &LogRecord::t, &LogRecord::acc_ref_n,
                            "north ref");
    auto re = column_series(records, &LogRecord::t, &LogRecord::acc_ref_e,
                            "east ref");
    auto rd = column_series(records, &LogRecord::t, &LogRecord::acc_ref_d,
                            "down ref");
    rn.dashed = re.dashed = rd.dashed = true;
    p.series.push_back(rn);
    p.series.push_back(re);
    p.series.push_back(rd);
    if (write_svg_plot(out("_accel.svg"), p)) written.push_back(out("_accel.svg"));
  }
  {
    PlotSpec p;
    p.title = "Ground track (airspeed arrows)";
    p.x_label = "east [m]";
    p.y_label = "north [m]";
    p.equal_aspect = true;
    p.series.push_back(
        column_series(records, &LogRecord::pos_e, &LogRecord::pos_n, "track"));

    const double dt =
        records.size() > 1 ? records[1].t - records[0].t : 0.002;
    const size_t every = static_cast<size_t>(std::max(1.0, 2.0 / dt));
    for (size_t i = 0; i < records.size(); i += every) {
      const auto& r = records[i];
      const double vh = std::hypot(r.vel_n, r.vel_e);
      if (vh < 0.5) continue;
      PlotArrow a;
      a.x = r.pos_e;
      a.y = r.pos_n;
      // Arrow length proportional to airspeed, along the ground course.
      a.dx = r.vel_e / vh * r.airspeed;
      a.dy = r.vel_n / vh * r.airspeed;
      p.arrows.push_back(a);
    }
    if (write_svg_plot(out("_track.svg"), p)) written.push_back(out("_track.svg"));
  }
  return written;
}

}  // namespace hoverwing
