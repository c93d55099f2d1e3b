#pragma once

#include <iosfwd>
#include <vector>

#include "piotrowski/dataset.hpp"

namespace piotrowski {

inline constexpr int kDefaultAnchorYear = 1380;

// Aggregated counts of one time window [start_year, end_year).
struct Bin {
  int start_year = 0;
  int end_year = 0;
  double midpoint = 0.0;
  Count recessive = 0;
  Count innovative = 0;

  Count trials() const noexcept { return recessive + innovative; }
  double proportion() const noexcept {
    return static_cast<double>(innovative) / static_cast<double>(trials());
  }
};

struct BinSeries {
  std::vector<Bin> bins;
  int window_years = 1;
  int overlap_years = 0;
  int anchor_year = kDefaultAnchorYear;

  int step() const noexcept { return window_years - overlap_years; }
  std::size_t size() const noexcept { return bins.size(); }
  bool empty() const noexcept { return bins.empty(); }
  Count total_trials() const noexcept;
};

/// Moving-window binning.
///
/// Windows are [anchor + k*step, anchor + k*step + window) with
/// step = window - overlap, starting at the largest anchor-aligned start not
/// after the dataset's first year and stopping once a start passes its last
/// year. Every year contributes to each window that contains it; windows with
/// zero trials are omitted. Midpoints are start + window/2.
///
/// Throws ParameterError unless window >= 1 and 0 <= overlap < window.
BinSeries make_bins(const ChangeDataset& ds, int window_years, int overlap_years,
                    int anchor_year = kDefaultAnchorYear);

// One bin per year with nonzero trials; midpoint = year + 0.5.
BinSeries raw_yearly_bins(const ChangeDataset& ds);

// Audit export: `start,end,midpoint,recessive,innovative,proportion`.
void write_bins_csv(std::ostream& out, const BinSeries& series);

}  // namespace piotrowski
