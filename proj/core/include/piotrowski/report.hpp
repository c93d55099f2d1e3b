#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "piotrowski/analysis.hpp"

namespace piotrowski {

enum class RadiusMode { Constant, LogAttestations };
enum class LineStyle { Solid, Dashed, Dotted };

struct PlotSpec {
  std::string title;
  std::optional<std::pair<double, double>> x_range;  // years; derived from data when unset
  RadiusMode radius_mode = RadiusMode::Constant;
  double base_radius = 1.5;
  double constant_radius = 3.0;
  // per-fit overrides; unlisted labels use default_line_style()
  std::map<std::string, LineStyle, std::less<>> line_styles;
  std::string x_label = "year";
  std::string y_label = "p(innovative)";
  double width = 800.0;
  double height = 500.0;
};

inline constexpr double kMinRadius = 1.0;
inline constexpr double kMaxRadius = 12.0;

// base_radius * ln(1 + trials) clamped to [1, 12] in log mode.
double point_radius(const PlotSpec& spec, Count trials) noexcept;

// raw_* fits dotted, unweighted fits dashed, everything else solid.
LineStyle default_line_style(std::string_view fit_label) noexcept;

// Fixed 8-colour palette, cycled by index.
std::string_view palette_color(std::size_t index) noexcept;

// A standalone SVG document.
struct FigureDocument {
  std::string markup;
  double width = 0.0;
  double height = 0.0;

  void save(const std::filesystem::path& path) const;
};

// Scatter of bin proportions plus one yearly-sampled curve per successful fit.
// Several analyses (e.g. the two halves of a split fit) share one axis pair.
// Throws DataError when no analysis holds a successful fit.
FigureDocument render_change_plot(const ChangeAnalysis& analysis, const PlotSpec& spec);
FigureDocument render_change_plot(std::span<const ChangeAnalysis> analyses, const PlotSpec& spec);

// R^2 against window size, one polyline per result at the given overlap.
// Throws DataError when no result has an entry at that overlap.
FigureDocument render_grid_plot(std::span<const GridResult> results, int overlap_years);

FigureDocument render_composite_plot(const CompositeModel& model);

struct TableText {
  std::string markdown;
  std::string csv;
  std::vector<std::string> warnings;
};

// Changes as rows, (window, overlap) cells as columns, R^2 to three decimals.
TableText emit_table(std::span<const GridResult> results,
                     std::span<const std::pair<int, int>> cells);

std::string format_r2(double r2);

}  // namespace piotrowski
