#include "piotrowski/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "piotrowski/errors.hpp"

namespace piotrowski {
namespace {

FitRecord attempt(std::string label, const BinSeries& series, int degree, Weighting weighting,
                  const FitOptions& options) {
  FitRecord record{std::move(label), std::nullopt, {}};
  try {
    record.fit = fit_logistic(series, degree, weighting, options);
  } catch (const Error& e) {
    record.error = e.what();
  }
  return record;
}

void add_binned_fits(ChangeAnalysis& a, const AnalysisConfig& cfg, int degree, bool polynomial) {
  auto label = [&](Weighting w) {
    if (polynomial) return labels::polynomial(degree, w);
    return std::string(w == Weighting::Weighted ? labels::kWeighted : labels::kUnweighted);
  };
  if (cfg.weighted) {
    a.fits.push_back(attempt(label(Weighting::Weighted), a.series, degree, Weighting::Weighted, cfg.fit));
  }
  if (cfg.unweighted) {
    a.fits.push_back(
        attempt(label(Weighting::Unweighted), a.series, degree, Weighting::Unweighted, cfg.fit));
  }
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParameterError(fmt::format("{}: '{}' is not an integer", what, s));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

unsigned resolve_threads(unsigned requested, std::size_t tasks) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

}  // namespace

std::string labels::polynomial(int degree, Weighting weighting) {
  return fmt::format("poly{}_{}", degree, to_string(weighting));
}

const FitRecord* ChangeAnalysis::find(std::string_view label) const noexcept {
  for (const auto& f : fits) {
    if (f.label == label) return &f;
  }
  return nullptr;
}

const LogisticFit* ChangeAnalysis::fit(std::string_view label) const noexcept {
  const auto* record = find(label);
  return record && record->fit ? &*record->fit : nullptr;
}

bool ChangeAnalysis::any_failed() const noexcept {
  return std::any_of(fits.begin(), fits.end(), [](const FitRecord& f) { return !f.ok(); });
}

std::size_t ChangeAnalysis::successful_fits() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(fits.begin(), fits.end(), [](const FitRecord& f) { return f.ok(); }));
}

ChangeAnalysis analyze_change(const ChangeDataset& ds, const AnalysisConfig& cfg) {
  ChangeAnalysis a;
  a.change = ds.name();
  a.series = make_bins(ds, cfg.window_years, cfg.overlap_years, cfg.anchor_year);
  add_binned_fits(a, cfg, cfg.degree, cfg.degree > 1);
  if (cfg.degree > 1) {
    a.preferred_fit = labels::polynomial(cfg.degree, Weighting::Weighted);
  }
  if (cfg.include_raw_yearly) {
    const BinSeries raw = raw_yearly_bins(ds);
    if (cfg.weighted) {
      a.fits.push_back(attempt(std::string(labels::kRawWeighted), raw, 1, Weighting::Weighted, cfg.fit));
    }
    if (cfg.unweighted) {
      a.fits.push_back(
          attempt(std::string(labels::kRawUnweighted), raw, 1, Weighting::Unweighted, cfg.fit));
    }
  }
  return a;
}

ChangeAnalysis analyze_polynomial(const ChangeDataset& ds, int degree, const AnalysisConfig& cfg) {
  if (degree < 2) {
    throw ParameterError(fmt::format("polynomial analysis needs degree >= 2, got {}", degree));
  }
  AnalysisConfig base = cfg;
  base.degree = 1;
  ChangeAnalysis a = analyze_change(ds, base);
  AnalysisConfig both = cfg;
  both.weighted = both.unweighted = true;
  add_binned_fits(a, both, degree, true);
  a.preferred_fit = labels::polynomial(degree, Weighting::Weighted);
  return a;
}

std::pair<ChangeAnalysis, ChangeAnalysis> split_fit(const ChangeDataset& ds, int split_year,
                                                    const AnalysisConfig& cfg) {
  if (ds.empty() || split_year <= ds.min_year() || split_year > ds.max_year()) {
    throw ParameterError(fmt::format("split year {} is not inside the data range of '{}'",
                                     split_year, ds.name()));
  }
  AnalysisConfig part_cfg = cfg;
  part_cfg.degree = 1;
  part_cfg.anchor_year = split_year;
  part_cfg.include_raw_yearly = false;

  auto analyze_part = [&](const ChangeDataset& part, bool before) {
    ChangeAnalysis a;
    a.change = part.name();
    a.series = make_bins(part, part_cfg.window_years, part_cfg.overlap_years, split_year);
    if (before) {
      std::erase_if(a.series.bins, [&](const Bin& b) { return b.end_year > split_year; });
    }
    add_binned_fits(a, part_cfg, 1, false);
    return a;
  };

  return {analyze_part(ds.restricted(std::numeric_limits<int>::min(), split_year)
                           .renamed(fmt::format("{}_before_{}", ds.name(), split_year)),
                       true),
          analyze_part(ds.restricted(split_year, std::numeric_limits<int>::max())
                           .renamed(fmt::format("{}_from_{}", ds.name(), split_year)),
                       false)};
}

const GridEntry* GridResult::find(int window, int overlap) const noexcept {
  for (const auto& e : entries) {
    if (e.window_years == window && e.overlap_years == overlap) return &e;
  }
  return nullptr;
}

GridResult grid_search(const ChangeDataset& ds, std::span<const int> windows,
                       std::span<const int> overlaps, Weighting weighting, int degree,
                       const GridOptions& options) {
  GridResult result;
  result.change = ds.name();
  result.weighting = weighting;
  result.degree = degree;

  std::vector<int> ws(windows.begin(), windows.end()), os(overlaps.begin(), overlaps.end());
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  std::sort(os.begin(), os.end());
  os.erase(std::unique(os.begin(), os.end()), os.end());
  for (int w : ws) {
    for (int o : os) {
      if (w > 0 && o >= 0 && o < w) result.entries.push_back({w, o, {}, {}, false, {}});
    }
  }

  auto run = [&](GridEntry& entry) {
    try {
      const BinSeries series = make_bins(ds, entry.window_years, entry.overlap_years, options.anchor_year);
      const LogisticFit fit = fit_logistic(series, degree, weighting, options.fit);
      entry.r2 = fit.mcfadden_r2;
      entry.p_value = fit.p_value;
      entry.converged = fit.converged;
      if (fit.separation) entry.error = "separation";
    } catch (const Error& e) {
      entry.error = e.what();
    }
  };

  const unsigned threads = resolve_threads(options.threads, result.entries.size());
  if (threads <= 1) {
    for (auto& e : result.entries) run(e);
    return result;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < result.entries.size(); i = next++) run(result.entries[i]);
    });
  }
  pool.clear();
  return result;
}

std::vector<int> default_lattice() {
  std::vector<int> v;
  for (int x = 5; x <= 100; x += 5) v.push_back(x);
  return v;
}

std::vector<int> parse_range(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_int(parts[0], "range")};
  if (parts.size() != 3) {
    throw ParameterError(fmt::format("range '{}' is not start:end:step", text));
  }
  const int start = parse_int(parts[0], "range start");
  const int end = parse_int(parts[1], "range end");
  const int step = parse_int(parts[2], "range step");
  if (step <= 0) throw ParameterError(fmt::format("range '{}' needs a positive step", text));
  std::vector<int> v;
  for (int x = start; x <= end; x += step) v.push_back(x);
  return v;
}

void write_grid_csv(std::ostream& out, std::span<const GridResult> results) {
  out << "change,window,overlap,weighting,degree,r2,p_value,converged\n";
  for (const auto& r : results) {
    for (const auto& e : r.entries) {
      out << fmt::format("{},{},{},{},{},{},{},{}\n", r.change, e.window_years, e.overlap_years,
                         to_string(r.weighting), r.degree,
                         e.r2 ? fmt::format("{:.6f}", *e.r2) : std::string(),
                         e.p_value ? fmt::format("{:.6g}", *e.p_value) : std::string(),
                         e.converged ? 1 : 0);
    }
  }
}

std::vector<GridResult> read_grid_csv(std::istream& in) {
  std::vector<GridResult> results;
  std::map<std::tuple<std::string, std::string, int>, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "change,window,overlap,weighting,degree,r2,p_value,converged") {
        throw ParseError(line_no, fmt::format("unexpected grid header '{}'", line));
      }
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 8) throw ParseError(line_no, fmt::format("expected 8 columns, found {}", f.size()));
    const auto weighting = parse_weighting(f[3]);
    if (!weighting) throw ParseError(line_no, fmt::format("unknown weighting '{}'", f[3]));
    GridEntry e;
    try {
      e.window_years = parse_int(f[1], "window");
      e.overlap_years = parse_int(f[2], "overlap");
      if (!f[5].empty()) e.r2 = std::stod(std::string(f[5]));
      if (!f[6].empty()) e.p_value = std::stod(std::string(f[6]));
      e.converged = f[7] == "1";
      const int degree = parse_int(f[4], "degree");
      const auto key = std::make_tuple(std::string(f[0]), std::string(f[3]), degree);
      auto [it, inserted] = index.try_emplace(key, results.size());
      if (inserted) results.push_back({std::string(f[0]), *weighting, degree, {}});
      results[it->second].entries.push_back(std::move(e));
    } catch (const ParameterError& err) {
      throw ParseError(line_no, err.what());
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed number");
    }
  }
  return results;
}

std::optional<double> CompositeModel::offset(std::string_view from, std::string_view to) const noexcept {
  for (const auto& o : offsets) {
    if (o.from == from && o.to == to) return o.years;
  }
  return std::nullopt;
}

CompositeModel composite(std::span<const ChangeAnalysis> analyses) {
  CompositeModel model;
  std::vector<std::pair<const ChangeAnalysis*, const LogisticFit*>> selected;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& a : analyses) {
    const LogisticFit* fit = a.fit(a.preferred_fit);
    if (!fit) continue;
    selected.emplace_back(&a, fit);
    lo = std::min(lo, fit->year_min);
    hi = std::max(hi, fit->year_max);
  }
  if (selected.empty()) return model;
  model.first_year = static_cast<int>(std::floor(lo));
  model.last_year = static_cast<int>(std::ceil(hi));

  for (const auto& [a, fit] : selected) {
    CompositeCurve curve;
    curve.change = a->change;
    curve.fit_label = a->preferred_fit;
    curve.degree = fit->degree;
    for (int y = model.first_year; y <= model.last_year; ++y) curve.probabilities.push_back(predict(*fit, y));
    if (fit->degree == 1) {
      const double t = to_piotrowski(*fit).t_half;
      if (std::isfinite(t)) curve.t_half = t;
    }
    model.curves.push_back(std::move(curve));
  }
  for (const auto& a : model.curves) {
    for (const auto& b : model.curves) {
      if (&a == &b || !a.t_half || !b.t_half) continue;
      model.offsets.push_back({a.change, b.change, *b.t_half - *a.t_half});
    }
  }
  return model;
}

void write_offsets_csv(std::ostream& out, const CompositeModel& model) {
  out << "from,to,offset_years\n";
  for (const auto& o : model.offsets) out << fmt::format("{},{},{:.3f}\n", o.from, o.to, o.years);
}

}  // namespace piotrowski
