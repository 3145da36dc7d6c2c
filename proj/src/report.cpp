#include "sidewinder/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "json.hpp"
#include "sidewinder/errors.hpp"

namespace sidewinder {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string num2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string opt(const std::optional<double>& v) {
  return v ? num(*v) : std::string();
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// Minimal deterministic SVG canvas. Every coordinate is rounded to 1/100
// so output bytes do not depend on printf platform quirks.
struct Canvas {
  double width, height;
  std::string body;

  Canvas(double w, double h) : width(w), height(h) {}

  void line(double x1, double y1, double x2, double y2,
            const std::string& color, double stroke = 1.0) {
    body += "<line x1=\"" + num2(x1) + "\" y1=\"" + num2(y1) + "\" x2=\"" +
            num2(x2) + "\" y2=\"" + num2(y2) + "\" stroke=\"" + color +
            "\" stroke-width=\"" + num2(stroke) + "\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& color, double stroke = 1.5) {
    body += "<polyline fill=\"none\" stroke=\"" + color +
            "\" stroke-width=\"" + num2(stroke) + "\" points=\"";
    for (const auto& [x, y] : pts) body += num2(x) + "," + num2(y) + " ";
    body += "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& color) {
    body += "<circle cx=\"" + num2(x) + "\" cy=\"" + num2(y) + "\" r=\"" +
            num2(r) + "\" fill=\"" + color + "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& color) {
    body += "<rect x=\"" + num2(x) + "\" y=\"" + num2(y) + "\" width=\"" +
            num2(w) + "\" height=\"" + num2(h) + "\" fill=\"" + color +
            "\"/>\n";
  }
  void text(double x, double y, const std::string& s, double size = 11,
            const std::string& anchor = "middle",
            const std::string& color = "#333333", double rotate = 0.0) {
    body += "<text x=\"" + num2(x) + "\" y=\"" + num2(y) +
            "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"" +
            num2(size) + "\" text-anchor=\"" + anchor + "\" fill=\"" + color +
            "\"";
    if (rotate != 0.0)
      body += " transform=\"rotate(" + num2(rotate) + " " + num2(x) + " " +
              num2(y) + ")\"";
    body += ">" + s + "</text>\n";
  }
  std::string render() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num2(width) +
           "\" height=\"" + num2(height) + "\" viewBox=\"0 0 " + num2(width) +
           " " + num2(height) + "\">\n<rect width=\"" + num2(width) +
           "\" height=\"" + num2(height) + "\" fill=\"#ffffff\"/>\n" + body +
           "</svg>\n";
  }
};

// Maps data coordinates into a plot frame with y growing upward.
struct Frame2D {
  double x0, x1, y0, y1;          // data range
  double px0, px1, py0, py1;      // pixel range (py0 = bottom)
  double x(double v) const { return px0 + (v - x0) / (x1 - x0) * (px1 - px0); }
  double y(double v) const { return py0 - (v - y0) / (y1 - y0) * (py0 - py1); }
};

void draw_x_ticks(Canvas& svg, const Frame2D& f,
                  const std::vector<double>& ticks) {
  for (double t : ticks) {
    svg.line(f.x(t), f.py0, f.x(t), f.py0 + 4, "#333333");
    svg.text(f.x(t), f.py0 + 16, num(t));
  }
}

void draw_y_ticks(Canvas& svg, const Frame2D& f,
                  const std::vector<double>& ticks, bool right = false,
                  const std::string& color = "#333333") {
  for (double t : ticks) {
    const double px = right ? f.px1 : f.px0;
    svg.line(px, f.y(t), px + (right ? 4 : -4), f.y(t), color);
    svg.text(px + (right ? 8 : -8), f.y(t) + 4, num(t), 11,
             right ? "start" : "end", color);
  }
}

void draw_axes(Canvas& svg, const Frame2D& f) {
  svg.line(f.px0, f.py0, f.px1, f.py0, "#333333");
  svg.line(f.px0, f.py0, f.px0, f.py1, "#333333");
}

std::vector<double> spread(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

std::string series_color(size_t i) {
  static const char* kColors[] = {"#444444", "#e67e22", "#2aa15f",
                                  "#2c5aa0", "#b03a8c", "#7f8c8d"};
  return kColors[i % 6];
}

// Aggregate group keys encode their granularity: per-cell rows carry a
// "d<spacing>-" segment, pooled per-G rows do not. Select by key shape —
// the spacing field alone cannot tell them apart when a sweep has a single
// spacing (the pool then legitimately carries that spacing).
bool is_cell(const AggregateRow& row) {
  return row.group.rfind("d", 0) == 0 || row.group.find("-d") != std::string::npos;
}

// Pooled per-G rows of a spacing sweep, in aggregate order.
std::vector<const AggregateRow*> pooled_rows(const SweepResult& sweep) {
  std::vector<const AggregateRow*> out;
  for (const AggregateRow& row : sweep.aggregates)
    if (!is_cell(row) && row.group.rfind("G", 0) == 0) out.push_back(&row);
  return out;
}

void plot_fig5(const SweepResult& sweep, const std::string& dir) {
  Canvas svg(560, 360);
  Frame2D f{0.0, 1.5, 0.0, 0.7, 70, 490, 300, 40};
  Frame2D fc{0.0, 1.5, 0.0, 0.7, 70, 490, 300, 40};  // right axis: cot
  draw_axes(svg, f);
  svg.line(f.px1, f.py0, f.px1, f.py1, "#333333");
  draw_x_ticks(svg, f, spread(0.0, 1.5, 7));
  draw_y_ticks(svg, f, spread(0.0, 0.7, 8), false, "#c0392b");
  draw_y_ticks(svg, fc, spread(0.0, 0.7, 8), true, "#2c5aa0");
  svg.text(280, 340, "generalized compliance G");
  svg.text(22, 170, "speed (m/cycle)", 11, "middle", "#c0392b", -90);
  svg.text(538, 170, "cost of transport", 11, "middle", "#2c5aa0", 90);

  std::vector<std::pair<double, double>> speed, cot;
  for (const AggregateRow& row : sweep.aggregates) {
    if (row.mean_displacement)
      speed.push_back({f.x(row.G), f.y(*row.mean_displacement)});
    if (row.mean_cot) cot.push_back({fc.x(row.G), fc.y(*row.mean_cot)});
  }
  svg.polyline(speed, "#c0392b");
  for (const auto& [x, y] : speed) svg.circle(x, y, 3, "#c0392b");
  svg.polyline(cot, "#2c5aa0");
  for (const auto& [x, y] : cot) svg.circle(x, y, 3, "#2c5aa0");

  open_out(dir, "fig5.svg") << svg.render();
}

void plot_fig6c(const SweepResult& sweep, const std::string& dir) {
  // One series per G over spacing / wavelength.
  std::vector<double> gs;
  std::vector<double> xs;
  for (const AggregateRow& row : sweep.aggregates) {
    if (!is_cell(row) || !row.spacing || !row.traverse_probability) continue;
    if (std::find(gs.begin(), gs.end(), row.G) == gs.end()) gs.push_back(row.G);
    const double x = *row.spacing / (sweep.wavelength > 0 ? sweep.wavelength : 1);
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  const double pad = xs.size() > 1 ? (xs.back() - xs.front()) * 0.08 : 0.05;

  Canvas svg(560, 360);
  Frame2D f{xs.front() - pad, xs.back() + pad, 0.0, 1.05, 70, 490, 300, 40};
  draw_axes(svg, f);
  draw_y_ticks(svg, f, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
  for (double x : xs) {
    svg.line(f.x(x), f.py0, f.x(x), f.py0 + 4, "#333333");
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    svg.text(f.x(x), f.py0 + 16, buf);
  }
  svg.text(280, 340, "obstacle spacing / wavelength");
  svg.text(22, 170, "traverse probability", 11, "middle", "#333333", -90);

  for (size_t gi = 0; gi < gs.size(); ++gi) {
    std::vector<std::pair<double, double>> pts;
    for (const AggregateRow& row : sweep.aggregates) {
      if (!is_cell(row) || !row.spacing || !row.traverse_probability ||
          row.G != gs[gi])
        continue;
      const double x =
          *row.spacing / (sweep.wavelength > 0 ? sweep.wavelength : 1);
      pts.push_back({f.x(x), f.y(*row.traverse_probability)});
    }
    std::sort(pts.begin(), pts.end());
    svg.polyline(pts, series_color(gi));
    for (const auto& [x, y] : pts) svg.circle(x, y, 3.5, series_color(gi));
    char label[24];
    std::snprintf(label, sizeof label, "G = %g", gs[gi]);
    svg.circle(400, 60 + 18 * gi, 3.5, series_color(gi));
    svg.text(410, 64 + 18 * gi, label, 11, "start");
  }
  open_out(dir, "fig6c.svg") << svg.render();
}

void plot_bars(const SweepResult& sweep, const std::string& dir,
               const std::string& file, bool cycles, const std::string& title,
               double y_max_floor) {
  const std::vector<const AggregateRow*> rows = pooled_rows(sweep);
  double y_max = y_max_floor;
  for (const AggregateRow* row : rows) {
    const std::optional<double>& m = cycles ? row->mean_cycles
                                            : row->mean_reorientation;
    const std::optional<double>& s = cycles ? row->std_cycles
                                            : row->std_reorientation;
    if (m) y_max = std::max(y_max, *m + (s ? *s : 0.0));
  }
  y_max *= 1.15;

  Canvas svg(460, 360);
  Frame2D f{0.0, double(rows.size()), 0.0, y_max, 70, 420, 300, 40};
  draw_axes(svg, f);
  draw_y_ticks(svg, f, spread(0.0, y_max, 6));
  svg.text(245, 340, "generalized compliance G");
  svg.text(22, 170, title, 11, "middle", "#333333", -90);

  for (size_t i = 0; i < rows.size(); ++i) {
    const AggregateRow& row = *rows[i];
    const double cx = f.x(i + 0.5);
    const double w = (f.x(1) - f.x(0)) * 0.55;
    char label[24];
    std::snprintf(label, sizeof label, "%g", row.G);
    svg.text(cx, f.py0 + 16, label);
    const std::optional<double>& m =
        cycles ? row.mean_cycles : row.mean_reorientation;
    const std::optional<double>& s =
        cycles ? row.std_cycles : row.std_reorientation;
    if (!m) {
      svg.text(cx, f.y(0) - 6, "no successes", 10);
      continue;
    }
    svg.rect(cx - w / 2, f.y(*m), w, f.py0 - f.y(*m), series_color(i));
    if (s && *s > 0) {
      const double lo = std::max(0.0, *m - *s);
      svg.line(cx, f.y(lo), cx, f.y(*m + *s), "#333333", 1.2);
      svg.line(cx - 5, f.y(lo), cx + 5, f.y(lo), "#333333", 1.2);
      svg.line(cx - 5, f.y(*m + *s), cx + 5, f.y(*m + *s), "#333333", 1.2);
    }
    char note[32];
    std::snprintf(note, sizeof note, "n=%d", row.n_success);
    svg.text(cx, f.py1 - 6 + 14, note, 10);
  }
  open_out(dir, file) << svg.render();
}

void plot_fig6d(const SweepResult& sweep, const std::string& dir) {
  // Grouped bars: traverse probability per (gait pair, G).
  std::vector<std::string> pairs;
  std::vector<double> gs;
  for (const AggregateRow& row : sweep.aggregates) {
    if (is_cell(row) || !row.traverse_probability) continue;
    const size_t cut = row.group.rfind("-G");
    if (cut == std::string::npos) continue;
    const std::string pair = row.group.substr(0, cut);
    if (std::find(pairs.begin(), pairs.end(), pair) == pairs.end())
      pairs.push_back(pair);
    if (std::find(gs.begin(), gs.end(), row.G) == gs.end()) gs.push_back(row.G);
  }
  Canvas svg(560, 360);
  Frame2D f{0.0, double(pairs.size()), 0.0, 1.05, 70, 490, 300, 40};
  draw_axes(svg, f);
  draw_y_ticks(svg, f, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
  svg.text(280, 345, "gait (lateral amplitude, spatial frequency)");
  svg.text(22, 170, "traverse probability", 11, "middle", "#333333", -90);

  const double slot = f.x(1) - f.x(0);
  const double w = slot * 0.8 / std::max<size_t>(1, gs.size());
  for (size_t pi = 0; pi < pairs.size(); ++pi) {
    svg.text(f.x(pi + 0.5), f.py0 + 16, pairs[pi], 10);
    for (size_t gi = 0; gi < gs.size(); ++gi) {
      for (const AggregateRow& row : sweep.aggregates) {
        if (is_cell(row) || !row.traverse_probability || row.G != gs[gi])
          continue;
        if (row.group.rfind(pairs[pi] + "-G", 0) != 0) continue;
        const double x = f.x(pi + 0.5) + (gi - (gs.size() - 1) / 2.0) * w;
        svg.rect(x - w * 0.42, f.y(*row.traverse_probability), w * 0.84,
                 f.py0 - f.y(*row.traverse_probability), series_color(gi));
      }
      char label[24];
      std::snprintf(label, sizeof label, "G = %g", gs[gi]);
      if (pi == 0) {
        svg.rect(396, 52 + 18 * gi, 8, 8, series_color(gi));
        svg.text(410, 60 + 18 * gi, label, 11, "start");
      }
    }
  }
  open_out(dir, "fig6d.svg") << svg.render();
}

}  // namespace

void write_results(const SweepResult& sweep, const std::string& dir) {
  std::ofstream out = open_out(dir, "results.csv");
  out << "label,G,spacing_m,ic_index,success,failure_mode,cycles_to_traverse,"
         "displacement_per_cycle_m,speed_bl_per_cycle,work_J,cot,"
         "reorientation_deg\n";
  for (const SweepRow& row : sweep.rows) {
    const TrialResult& r = row.result;
    out << row.label << ',' << num(row.G) << ',' << opt(row.spacing) << ',';
    if (row.ic_index >= 0) out << row.ic_index;
    out << ',' << (r.success ? 1 : 0) << ',' << to_string(r.failure_mode)
        << ',' << num(r.cycles_to_traverse) << ','
        << num(r.displacement_per_cycle) << ',' << num(r.speed_bl_per_cycle)
        << ',' << num(r.work_total) << ',' << num(r.cot) << ','
        << num(r.reorientation) << '\n';
  }

  std::ofstream agg = open_out(dir, "aggregates.csv");
  agg << "group,G,spacing_m,n_trials,n_success,traverse_probability,"
         "mean_cycles,std_cycles,mean_displacement_per_cycle_m,"
         "std_displacement_per_cycle_m,mean_speed_bl_per_cycle,"
         "std_speed_bl_per_cycle,mean_work_J,std_work_J,mean_cot,std_cot,"
         "mean_reorientation_deg,std_reorientation_deg\n";
  for (const AggregateRow& row : sweep.aggregates) {
    agg << row.group << ',' << num(row.G) << ',' << opt(row.spacing) << ','
        << row.n_trials << ',' << row.n_success << ','
        << opt(row.traverse_probability) << ',' << opt(row.mean_cycles) << ','
        << opt(row.std_cycles) << ',' << opt(row.mean_displacement) << ','
        << opt(row.std_displacement) << ',' << opt(row.mean_speed) << ','
        << opt(row.std_speed) << ',' << opt(row.mean_work) << ','
        << opt(row.std_work) << ',' << opt(row.mean_cot) << ','
        << opt(row.std_cot) << ',' << opt(row.mean_reorientation) << ','
        << opt(row.std_reorientation) << '\n';
  }
}

std::string write_trajectory(const std::string& label,
                             const TrajectoryLog& log,
                             const std::string& dir) {
  const std::string name = "trajectory-" + label + ".jsonl";
  std::ofstream out = open_out(dir, name);
  for (const TrajectoryRecord& rec : log) {
    nlohmann::json j;
    j["t"] = rec.t;
    j["phase"] = rec.phase;
    j["base"] = {{"x", rec.base.x}, {"y", rec.base.y}, {"theta", rec.base.theta}};
    j["alpha"] = rec.alpha;
    j["contacts"] = rec.contacts;
    j["slip_total"] = rec.slip_total;
    j["work_increment"] = rec.work_increment;
    out << j.dump() << '\n';
  }
  return name;
}

void write_config_echo(const std::string& echo_text, const std::string& dir) {
  open_out(dir, "config.echo") << echo_text;
}

void emit_plots(const SweepResult& sweep, const std::string& dir) {
  if (sweep.rows.empty())
    throw MismatchedExperiment("emit_plots: empty sweep");
  switch (sweep.kind) {
    case ExperimentKind::FlatSweep:
      plot_fig5(sweep, dir);
      return;
    case ExperimentKind::SpacingSweep:
      plot_fig6c(sweep, dir);
      plot_bars(sweep, dir, "fig6e.svg", true, "cycles to traverse", 1.0);
      plot_bars(sweep, dir, "fig6f.svg", false, "reorientation (deg)", 10.0);
      return;
    case ExperimentKind::GaitSweep:
      plot_fig6d(sweep, dir);
      return;
    case ExperimentKind::Single:
      throw MismatchedExperiment(
          "emit_plots: no figure is defined for a single trial");
  }
}

}  // namespace sidewinder
