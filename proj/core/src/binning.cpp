#include "piotrowski/binning.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "piotrowski/errors.hpp"

namespace piotrowski {
namespace {

int floor_div(int a, int b) {
  const int q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

}  // namespace

Count BinSeries::total_trials() const noexcept {
  Count total = 0;
  for (const auto& b : bins) total += b.trials();
  return total;
}

BinSeries make_bins(const ChangeDataset& ds, int window_years, int overlap_years, int anchor_year) {
  if (window_years < 1) {
    throw ParameterError(fmt::format("window must be >= 1 year, got {}", window_years));
  }
  if (overlap_years < 0 || overlap_years >= window_years) {
    throw ParameterError(fmt::format("overlap {} must be in [0, window {})", overlap_years,
                                     window_years));
  }

  BinSeries series;
  series.window_years = window_years;
  series.overlap_years = overlap_years;
  series.anchor_year = anchor_year;
  if (ds.empty()) return series;

  const auto& records = ds.records();
  // prefix[i] holds the sums over records[0, i)
  std::vector<Count> rec_prefix(records.size() + 1, 0), inn_prefix(records.size() + 1, 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    rec_prefix[i + 1] = rec_prefix[i] + records[i].recessive;
    inn_prefix[i + 1] = inn_prefix[i] + records[i].innovative;
  }
  auto lower = [&](int year) {
    return static_cast<std::size_t>(
        std::lower_bound(records.begin(), records.end(), year,
                         [](const YearCount& r, int y) { return r.year < y; }) -
        records.begin());
  };

  const int step = window_years - overlap_years;
  const int first_year = ds.min_year();
  const int last_year = ds.max_year();
  for (int start = anchor_year + floor_div(first_year - anchor_year, step) * step;
       start <= last_year; start += step) {
    const int end = start + window_years;
    const auto lo = lower(start), hi = lower(end);
    Bin bin{start, end, start + window_years / 2.0, rec_prefix[hi] - rec_prefix[lo],
            inn_prefix[hi] - inn_prefix[lo]};
    if (bin.trials() > 0) series.bins.push_back(bin);
  }
  return series;
}

BinSeries raw_yearly_bins(const ChangeDataset& ds) {
  BinSeries series;
  series.window_years = 1;
  series.overlap_years = 0;
  series.anchor_year = ds.empty() ? kDefaultAnchorYear : ds.min_year();
  for (const auto& r : ds.records()) {
    if (r.trials() == 0) continue;
    series.bins.push_back({r.year, r.year + 1, r.year + 0.5, r.recessive, r.innovative});
  }
  return series;
}

void write_bins_csv(std::ostream& out, const BinSeries& series) {
  out << "start,end,midpoint,recessive,innovative,proportion\n";
  for (const auto& b : series.bins) {
    out << fmt::format("{},{},{:.1f},{},{},{:.6f}\n", b.start_year, b.end_year, b.midpoint,
                       b.recessive, b.innovative, b.proportion());
  }
}

}  // namespace piotrowski
