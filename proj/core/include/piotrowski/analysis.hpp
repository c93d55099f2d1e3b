#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "piotrowski/dataset.hpp"
#include "piotrowski/glm.hpp"

namespace piotrowski {

struct AnalysisConfig {
  int window_years = 20;
  int overlap_years = 10;
  int anchor_year = kDefaultAnchorYear;
  int degree = 1;
  bool weighted = true;
  bool unweighted = true;
  bool include_raw_yearly = true;
  FitOptions fit;
};

// Fit labels used inside a ChangeAnalysis.
namespace labels {
inline constexpr std::string_view kWeighted = "weighted";
inline constexpr std::string_view kUnweighted = "unweighted";
inline constexpr std::string_view kRawWeighted = "raw_weighted";
inline constexpr std::string_view kRawUnweighted = "raw_unweighted";
std::string polynomial(int degree, Weighting weighting);
}  // namespace labels

// One attempted fit; either `fit` is set or `error` explains the failure.
struct FitRecord {
  std::string label;
  std::optional<LogisticFit> fit;
  std::string error;

  bool ok() const noexcept { return fit.has_value(); }
};

struct ChangeAnalysis {
  std::string change;
  BinSeries series;
  std::vector<FitRecord> fits;
  // label of the fit that represents this change in composite views
  std::string preferred_fit = std::string(labels::kWeighted);

  const FitRecord* find(std::string_view label) const noexcept;
  const LogisticFit* fit(std::string_view label) const noexcept;
  bool any_failed() const noexcept;
  std::size_t successful_fits() const noexcept;
};

// Binned fits at the configured degree in each enabled weighting, plus the
// one-year raw fits when enabled. Fit failures are recorded, not thrown;
// invalid binning parameters throw ParameterError.
ChangeAnalysis analyze_change(const ChangeDataset& ds, const AnalysisConfig& cfg);

// analyze_change plus degree-`degree` polynomial fits in both weightings; the
// weighted polynomial becomes the preferred fit.
ChangeAnalysis analyze_polynomial(const ChangeDataset& ds, int degree, const AnalysisConfig& cfg);

// Independent degree-1 fits of years < split_year and years >= split_year.
// Both parts are binned from the split year so no window crosses it.
// Throws ParameterError unless split_year lies strictly inside the year range.
std::pair<ChangeAnalysis, ChangeAnalysis> split_fit(const ChangeDataset& ds, int split_year,
                                                    const AnalysisConfig& cfg);

struct GridEntry {
  int window_years = 0;
  int overlap_years = 0;
  std::optional<double> r2;
  std::optional<double> p_value;
  bool converged = false;
  std::string error;
};

struct GridResult {
  std::string change;
  Weighting weighting = Weighting::Unweighted;
  int degree = 1;
  std::vector<GridEntry> entries;  // sorted by (window, overlap)

  const GridEntry* find(int window, int overlap) const noexcept;
};

struct GridOptions {
  int anchor_year = kDefaultAnchorYear;
  // 0 selects std::thread::hardware_concurrency()
  unsigned threads = 1;
  FitOptions fit;
};

// Fits every (window, overlap) with overlap < window; entry order is
// (window, overlap) ascending regardless of thread count.
GridResult grid_search(const ChangeDataset& ds, std::span<const int> windows,
                       std::span<const int> overlaps, Weighting weighting, int degree,
                       const GridOptions& options = {});

// 5, 10, ..., 100
std::vector<int> default_lattice();

// `start:end:step`, end inclusive when aligned; a bare integer is a single value.
std::vector<int> parse_range(std::string_view text);

// `change,window,overlap,weighting,degree,r2,p_value,converged`
void write_grid_csv(std::ostream& out, std::span<const GridResult> results);
std::vector<GridResult> read_grid_csv(std::istream& in);

struct CompositeCurve {
  std::string change;
  std::string fit_label;
  int degree = 1;
  std::vector<double> probabilities;  // one per year of the shared axis
  std::optional<double> t_half;       // degree-1 curves only
};

struct CrossingOffset {
  std::string from;
  std::string to;
  double years = 0.0;  // t_half(to) - t_half(from)
};

struct CompositeModel {
  int first_year = 0;
  int last_year = 0;
  std::vector<CompositeCurve> curves;
  std::vector<CrossingOffset> offsets;  // ordered pairs between degree-1 curves

  std::optional<double> offset(std::string_view from, std::string_view to) const noexcept;
  double year(std::size_t index) const noexcept { return first_year + static_cast<double>(index); }
};

// Shared yearly axis over the union of the analyses' ranges, one curve per
// analysis from its preferred fit. Analyses whose preferred fit failed are
// skipped.
CompositeModel composite(std::span<const ChangeAnalysis> analyses);

void write_offsets_csv(std::ostream& out, const CompositeModel& model);

}  // namespace piotrowski
