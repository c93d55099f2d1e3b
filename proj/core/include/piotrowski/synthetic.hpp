#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "piotrowski/binning.hpp"
#include "piotrowski/dataset.hpp"

namespace piotrowski::synthetic {

// Exact attestation volume for years in [from, to).
struct VolumeSegment {
  int from = 0;
  int to = 0;
  Count total = 0;
};

/// Recipe for a synthetic change.
///
/// The innovative share follows inverse_logit(sum_k logit_coeffs[k] u^k) with
/// u = (year - origin) / 100, jittered per year by N(0, noise_sd) on the logit
/// scale. `text_years` distinct years are drawn with at least one per decade,
/// volume grows by exp(growth) per century, and the grand total equals `total`
/// exactly.
struct ChangeSpec {
  std::string name;
  std::string recessive_label = "recessive";
  std::string innovative_label = "innovative";
  int first_year = 1400;
  int last_year = 1849;
  double origin = 1600.0;
  std::vector<double> logit_coeffs = {0.0, 4.0};
  Count total = 10000;
  int text_years = 200;
  double growth = 1.0;
  double noise_sd = 0.3;
  std::vector<int> required_years;
  std::vector<VolumeSegment> segments;
  std::uint64_t seed = 1;
};

double logit_at(const ChangeSpec& spec, double year) noexcept;

// Year records (sorted, one per drawn year, every trial count >= 1).
std::vector<YearCount> generate_records(const ChangeSpec& spec);

ChangeDataset generate(const ChangeSpec& spec);

// Moves attestations between the two forms within [from, to) until the
// innovative total there equals target; per-year trials are unchanged.
// Throws ParameterError when the target exceeds the trials available.
void set_innovative_total(std::vector<YearCount>& records, int from, int to, Count target);

// Ensures the given year carries at least one attestation of the form.
void ensure_innovative(std::vector<YearCount>& records, int year);
void ensure_recessive(std::vector<YearCount>& records, int year);

// Consecutive `width`-year bins over [first_year, last_year) with `trials`
// attestations each, innovative ~ Binomial(trials, inverse_logit(beta0 + beta1 * midpoint)).
BinSeries logistic_bins(double beta0, double beta1, int first_year, int last_year, int width,
                        Count trials, std::mt19937_64& rng);

}  // namespace piotrowski::synthetic
