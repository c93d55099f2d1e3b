#include "piotrowski/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "piotrowski/errors.hpp"

namespace piotrowski {
namespace {

constexpr std::array<std::string_view, 8> kPalette = {
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string escape(std::string_view s) {
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

std::string_view dash_array(LineStyle style) {
  switch (style) {
    case LineStyle::Dashed: return "8,4";
    case LineStyle::Dotted: return "2,3";
    case LineStyle::Solid: break;
  }
  return "";
}

double nice_step(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

// Plot area with data-to-pixel mapping; y data always spans [0, 1].
class Canvas {
 public:
  Canvas(double width, double height, double x_lo, double x_hi)
      : width_(width), height_(height), x_lo_(x_lo), x_hi_(x_hi > x_lo ? x_hi : x_lo + 1.0) {
    out_ += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
        "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        width, height);
    out_ += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n",
                        width, height);
  }

  double px(double x) const { return kLeft + (x - x_lo_) / (x_hi_ - x_lo_) * plot_width(); }
  double py(double y) const { return kTop + (1.0 - y) * plot_height(); }
  double plot_width() const { return width_ - kLeft - kRight; }
  double plot_height() const { return height_ - kTop - kBottom; }

  void axes(std::string_view title, std::string_view x_label, std::string_view y_label,
            bool integer_x) {
    out_ += fmt::format(
        "<rect class=\"frame\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
        "fill=\"none\" stroke=\"black\"/>\n",
        kLeft, kTop, plot_width(), plot_height());
    const double step = nice_step(x_hi_ - x_lo_, 8);
    for (double t = std::ceil(x_lo_ / step) * step; t <= x_hi_ + 1e-9; t += step) {
      const double x = px(t);
      out_ += fmt::format(
          "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", x,
          kTop + plot_height(), kTop + plot_height() + 5);
      out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x,
                          kTop + plot_height() + 18,
                          integer_x ? fmt::format("{:.0f}", t) : fmt::format("{:g}", t));
    }
    for (int i = 0; i <= 4; ++i) {
      const double v = i * 0.25;
      const double y = py(v);
      out_ += fmt::format(
          "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n",
          kLeft - 5, y, kLeft);
      out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.2f}</text>\n",
                          kLeft - 8, y + 4, v);
    }
    out_ += fmt::format("<text class=\"title\" x=\"{:.2f}\" y=\"20\" text-anchor=\"middle\" "
                        "font-size=\"14\">{}</text>\n",
                        kLeft + plot_width() / 2, escape(title));
    out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                        kLeft + plot_width() / 2, height_ - 10, escape(x_label));
    out_ += fmt::format(
        "<text x=\"15\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {0:.2f})\">{1}"
        "</text>\n",
        kTop + plot_height() / 2, escape(y_label));
  }

  void point(std::string_view cls, double x, double y, double r, std::string_view color) {
    out_ += fmt::format(
        "<circle class=\"{}\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\" "
        "fill-opacity=\"0.7\"/>\n",
        cls, px(x), py(y), r, color);
  }

  void polyline(std::string_view cls, std::string_view label,
                const std::vector<std::pair<double, double>>& pts, std::string_view color,
                LineStyle style) {
    std::string coords;
    for (const auto& [x, y] : pts) {
      if (!coords.empty()) coords += ' ';
      coords += fmt::format("{:.2f},{:.2f}", px(x), py(std::clamp(y, 0.0, 1.0)));
    }
    const auto dash = dash_array(style);
    out_ += fmt::format(
        "<polyline class=\"{}\" data-label=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"2\"{}/>\n",
        cls, escape(label), coords, color,
        dash.empty() ? std::string() : fmt::format(" stroke-dasharray=\"{}\"", dash));
  }

  void legend(std::size_t row, std::string_view label, std::string_view color, LineStyle style) {
    const double x = width_ - kRight + 10;
    const double y = kTop + 10 + 18.0 * static_cast<double>(row);
    const auto dash = dash_array(style);
    out_ += fmt::format(
        "<line class=\"legend\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"2\"{}/>\n",
        x, y, x + 20, y, color,
        dash.empty() ? std::string() : fmt::format(" stroke-dasharray=\"{}\"", dash));
    out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", x + 25, y + 4, escape(label));
  }

  FigureDocument finish() {
    out_ += "</svg>\n";
    return {std::move(out_), width_, height_};
  }

 private:
  static constexpr double kLeft = 60.0;
  static constexpr double kRight = 170.0;
  static constexpr double kTop = 35.0;
  static constexpr double kBottom = 45.0;

  double width_, height_, x_lo_, x_hi_;
  std::string out_;
};

std::vector<std::pair<double, double>> sample_curve(const LogisticFit& fit) {
  std::vector<std::pair<double, double>> pts;
  for (double y = std::ceil(fit.year_min); y <= std::floor(fit.year_max); y += 1.0) {
    pts.emplace_back(y, predict(fit, y));
  }
  return pts;
}

}  // namespace

double point_radius(const PlotSpec& spec, Count trials) noexcept {
  if (spec.radius_mode == RadiusMode::Constant) return spec.constant_radius;
  const double r = spec.base_radius * std::log1p(static_cast<double>(std::max<Count>(trials, 0)));
  return std::clamp(r, kMinRadius, kMaxRadius);
}

LineStyle default_line_style(std::string_view fit_label) noexcept {
  if (fit_label.starts_with("raw_")) return LineStyle::Dotted;
  if (fit_label.ends_with("unweighted")) return LineStyle::Dashed;
  return LineStyle::Solid;
}

std::string_view palette_color(std::size_t index) noexcept { return kPalette[index % kPalette.size()]; }

void FigureDocument::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << markup;
}

FigureDocument render_change_plot(const ChangeAnalysis& analysis, const PlotSpec& spec) {
  return render_change_plot(std::span<const ChangeAnalysis>(&analysis, 1), spec);
}

FigureDocument render_change_plot(std::span<const ChangeAnalysis> analyses, const PlotSpec& spec) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t ok_fits = 0;
  for (const auto& a : analyses) {
    for (const auto& b : a.series.bins) {
      lo = std::min(lo, static_cast<double>(b.start_year));
      hi = std::max(hi, static_cast<double>(b.end_year));
    }
    for (const auto& f : a.fits) {
      if (!f.fit) continue;
      ++ok_fits;
      lo = std::min(lo, f.fit->year_min);
      hi = std::max(hi, f.fit->year_max);
    }
  }
  if (ok_fits == 0) throw DataError("analysis has no successful fit to draw");
  if (spec.x_range) std::tie(lo, hi) = *spec.x_range;

  Canvas canvas(spec.width, spec.height, lo, hi);
  std::string title = spec.title;
  if (title.empty()) {
    for (const auto& a : analyses) title += (title.empty() ? "" : " | ") + a.change;
  }
  canvas.axes(title, spec.x_label, spec.y_label, true);

  for (const auto& a : analyses) {
    for (const auto& b : a.series.bins) {
      canvas.point("bin", b.midpoint, b.proportion(), point_radius(spec, b.trials()), "black");
    }
  }
  std::size_t row = 0;
  for (const auto& a : analyses) {
    for (const auto& f : a.fits) {
      if (!f.fit) continue;
      const auto it = spec.line_styles.find(f.label);
      const LineStyle style = it != spec.line_styles.end() ? it->second : default_line_style(f.label);
      const auto color = palette_color(row);
      const std::string label = analyses.size() > 1 ? a.change + " " + f.label : f.label;
      canvas.polyline("fit", label, sample_curve(*f.fit), color, style);
      canvas.legend(row, fmt::format("{} (R2 {})", label, format_r2(f.fit->mcfadden_r2)), color, style);
      ++row;
    }
  }
  return canvas.finish();
}

FigureDocument render_grid_plot(std::span<const GridResult> results, int overlap_years) {
  struct Series {
    const GridResult* result;
    std::vector<std::pair<double, double>> points;
  };
  std::vector<Series> series;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : results) {
    Series s{&r, {}};
    for (const auto& e : r.entries) {
      if (e.overlap_years != overlap_years || !e.r2) continue;
      s.points.emplace_back(e.window_years, *e.r2);
      lo = std::min(lo, static_cast<double>(e.window_years));
      hi = std::max(hi, static_cast<double>(e.window_years));
    }
    if (!s.points.empty()) series.push_back(std::move(s));
  }
  if (series.empty()) {
    throw DataError(fmt::format("no grid entries with overlap {}", overlap_years));
  }
  if (hi - lo < 1.0) {
    lo -= 5.0;
    hi += 5.0;
  }

  Canvas canvas(800.0, 500.0, lo, hi);
  canvas.axes(fmt::format("Goodness of fit by window size ({}-year overlap)", overlap_years),
              "window size (years)", "McFadden R2", true);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto color = palette_color(i);
    const auto& s = series[i];
    const std::string label = fmt::format("{} ({})", s.result->change, to_string(s.result->weighting));
    if (s.points.size() == 1) {
      canvas.point("grid-point", s.points[0].first, s.points[0].second, 4.0, color);
    } else {
      canvas.polyline("grid", label, s.points, color, LineStyle::Solid);
    }
    canvas.legend(i, label, color, LineStyle::Solid);
  }
  return canvas.finish();
}

FigureDocument render_composite_plot(const CompositeModel& model) {
  Canvas canvas(800.0, 500.0, model.first_year, model.last_year);
  canvas.axes("Composite view of all changes", "year", "p(innovative)", true);
  for (std::size_t i = 0; i < model.curves.size(); ++i) {
    const auto& c = model.curves[i];
    std::vector<std::pair<double, double>> pts;
    pts.reserve(c.probabilities.size());
    for (std::size_t k = 0; k < c.probabilities.size(); ++k) pts.emplace_back(model.year(k), c.probabilities[k]);
    const auto color = palette_color(i);
    canvas.polyline("composite", c.change, pts, color, LineStyle::Solid);
    canvas.legend(i, c.t_half ? fmt::format("{} (t1/2 {:.0f})", c.change, *c.t_half) : c.change, color,
                  LineStyle::Solid);
  }
  return canvas.finish();
}

std::string format_r2(double r2) { return fmt::format("{:.3f}", r2); }

TableText emit_table(std::span<const GridResult> results, std::span<const std::pair<int, int>> cells) {
  TableText t;
  t.markdown = "| change |";
  t.csv = "change";
  for (const auto& [w, o] : cells) {
    t.markdown += fmt::format(" window {} / overlap {} |", w, o);
    t.csv += fmt::format(",w{}_o{}", w, o);
  }
  t.markdown += "\n|---|";
  for (std::size_t i = 0; i < cells.size(); ++i) t.markdown += "---:|";
  t.markdown += '\n';
  t.csv += '\n';

  for (const auto& r : results) {
    t.markdown += fmt::format("| {} |", r.change);
    t.csv += r.change;
    for (const auto& [w, o] : cells) {
      const auto* e = r.find(w, o);
      std::string cell;
      if (e && e->r2) {
        cell = format_r2(*e->r2);
      } else {
        t.warnings.push_back(fmt::format("{}: no R2 for window {} / overlap {}", r.change, w, o));
      }
      t.markdown += fmt::format(" {} |", cell);
      t.csv += ',' + cell;
    }
    t.markdown += '\n';
    t.csv += '\n';
  }
  return t;
}

}  // namespace piotrowski
