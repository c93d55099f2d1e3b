#include "piotrowski/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "piotrowski/errors.hpp"
#include "piotrowski/glm.hpp"

namespace piotrowski::synthetic {
namespace {

// Largest-remainder apportionment of `total` over `weights`, each share >= 1.
std::vector<Count> apportion(const std::vector<double>& weights, Count total) {
  const auto n = static_cast<Count>(weights.size());
  std::vector<Count> shares(weights.size(), 1);
  Count rest = total - n;
  if (rest <= 0) return shares;
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::pair<double, std::size_t>> remainders;
  Count assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(rest) * weights[i] / sum;
    const auto whole = static_cast<Count>(std::floor(exact));
    shares[i] += whole;
    assigned += whole;
    remainders.emplace_back(exact - static_cast<double>(whole), i);
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  for (Count k = 0; k < rest - assigned; ++k) ++shares[remainders[static_cast<std::size_t>(k)].second];
  return shares;
}

bool in_segment(const VolumeSegment& s, int year) { return year >= s.from && year < s.to; }

}  // namespace

double logit_at(const ChangeSpec& spec, double year) noexcept {
  const double u = (year - spec.origin) / 100.0;
  double eta = 0.0;
  for (auto it = spec.logit_coeffs.rbegin(); it != spec.logit_coeffs.rend(); ++it) eta = eta * u + *it;
  return eta;
}

std::vector<YearCount> generate_records(const ChangeSpec& spec) {
  if (spec.first_year > spec.last_year) throw ParameterError("synthetic range is empty");
  std::mt19937_64 rng(spec.seed);

  // year draw: one per decade, the required years, then volume-weighted fill
  std::set<int> years(spec.required_years.begin(), spec.required_years.end());
  for (int d = spec.first_year; d <= spec.last_year; d += 10) {
    std::uniform_int_distribution<int> pick(d, std::min(d + 9, spec.last_year));
    years.insert(pick(rng));
  }
  auto density = [&](int y) { return std::exp(spec.growth * (y - spec.first_year) / 100.0); };
  std::vector<double> year_weights;
  for (int y = spec.first_year; y <= spec.last_year; ++y) year_weights.push_back(density(y));
  std::discrete_distribution<int> draw(year_weights.begin(), year_weights.end());
  const auto span = spec.last_year - spec.first_year + 1;
  while (static_cast<int>(years.size()) < std::min(spec.text_years, span)) {
    years.insert(spec.first_year + draw(rng));
  }

  // volume: segments first, the remainder over the other years
  std::lognormal_distribution<double> jitter(0.0, 0.5);
  std::vector<int> ordered(years.begin(), years.end());
  std::vector<double> weight;
  for (int y : ordered) weight.push_back(density(y) * jitter(rng));

  std::vector<Count> volume(ordered.size(), 0);
  std::vector<bool> claimed(ordered.size(), false);
  Count segment_total = 0;
  for (const auto& seg : spec.segments) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      if (!claimed[i] && in_segment(seg, ordered[i])) members.push_back(i);
    }
    if (members.empty()) {
      throw ParameterError(fmt::format("segment [{}, {}) holds no drawn year", seg.from, seg.to));
    }
    // a small segment total keeps only its heaviest years
    std::stable_sort(members.begin(), members.end(), [&](auto a, auto b) { return weight[a] > weight[b]; });
    for (std::size_t k = 0; k < members.size(); ++k) claimed[members[k]] = true;
    if (static_cast<Count>(members.size()) > seg.total) members.resize(static_cast<std::size_t>(seg.total));
    std::vector<double> w;
    for (auto i : members) w.push_back(weight[i]);
    const auto shares = apportion(w, seg.total);
    for (std::size_t k = 0; k < members.size(); ++k) volume[members[k]] = shares[k];
    segment_total += seg.total;
  }
  std::vector<std::size_t> free_years;
  std::vector<double> free_weights;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (!claimed[i]) {
      free_years.push_back(i);
      free_weights.push_back(weight[i]);
    }
  }
  if (static_cast<Count>(free_years.size()) > spec.total - segment_total) {
    throw ParameterError("synthetic total too small for the number of years");
  }
  const auto shares = apportion(free_weights, spec.total - segment_total);
  for (std::size_t k = 0; k < free_years.size(); ++k) volume[free_years[k]] = shares[k];

  std::normal_distribution<double> noise(0.0, spec.noise_sd);
  std::vector<YearCount> records;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (volume[i] == 0) continue;
    const double p = inverse_logit(logit_at(spec, ordered[i]) + (spec.noise_sd > 0 ? noise(rng) : 0.0));
    std::binomial_distribution<Count> successes(volume[i], p);
    const Count innovative = successes(rng);
    records.push_back({ordered[i], volume[i] - innovative, innovative});
  }
  return records;
}

ChangeDataset generate(const ChangeSpec& spec) {
  return ChangeDataset(spec.name, generate_records(spec), spec.recessive_label, spec.innovative_label);
}

void set_innovative_total(std::vector<YearCount>& records, int from, int to, Count target) {
  Count current = 0, available = 0;
  for (const auto& r : records) {
    if (r.year >= from && r.year < to) {
      current += r.innovative;
      available += r.trials();
    }
  }
  if (target < 0 || target > available) {
    throw ParameterError(fmt::format("cannot place {} innovative attestations in [{}, {})", target, from, to));
  }
  if (current < target) {
    // convert from the latest years first
    for (auto it = records.rbegin(); it != records.rend() && current < target; ++it) {
      if (it->year < from || it->year >= to) continue;
      const Count moved = std::min(target - current, it->recessive);
      it->recessive -= moved;
      it->innovative += moved;
      current += moved;
    }
  } else {
    for (auto& r : records) {
      if (current == target) break;
      if (r.year < from || r.year >= to) continue;
      const Count moved = std::min(current - target, r.innovative);
      r.innovative -= moved;
      r.recessive += moved;
      current -= moved;
    }
  }
}

void ensure_innovative(std::vector<YearCount>& records, int year) {
  for (auto& r : records) {
    if (r.year == year && r.innovative == 0 && r.recessive > 0) {
      --r.recessive;
      ++r.innovative;
    }
  }
}

void ensure_recessive(std::vector<YearCount>& records, int year) {
  for (auto& r : records) {
    if (r.year == year && r.recessive == 0 && r.innovative > 0) {
      --r.innovative;
      ++r.recessive;
    }
  }
}

BinSeries logistic_bins(double beta0, double beta1, int first_year, int last_year, int width,
                        Count trials, std::mt19937_64& rng) {
  BinSeries series;
  series.window_years = width;
  series.overlap_years = 0;
  series.anchor_year = first_year;
  for (int start = first_year; start + width <= last_year; start += width) {
    const double mid = start + width / 2.0;
    std::binomial_distribution<Count> draw(trials, inverse_logit(beta0 + beta1 * mid));
    const Count innovative = draw(rng);
    series.bins.push_back({start, start + width, mid, trials - innovative, innovative});
  }
  return series;
}

}  // namespace piotrowski::synthetic
