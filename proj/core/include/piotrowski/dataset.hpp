#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace piotrowski {

using Count = std::int64_t;

inline constexpr int kMinYear = 1000;
inline constexpr int kMaxYear = 2100;

struct YearCount {
  int year = 0;
  Count recessive = 0;
  Count innovative = 0;

  Count trials() const noexcept { return recessive + innovative; }
  friend bool operator==(const YearCount&, const YearCount&) = default;
};

// One text of the per-text input format; its counts land on the floor
// midpoint of [year_from, year_to].
struct TextRecord {
  std::string text_id;
  int year_from = 0;
  int year_to = 0;
  Count recessive = 0;
  Count innovative = 0;

  int assigned_year() const noexcept;
};

struct Totals {
  Count recessive = 0;
  Count innovative = 0;
  Count grand = 0;

  friend bool operator==(const Totals&, const Totals&) = default;
};

/// Per-year attestation counts of a recessive and an innovative form.
///
/// Construction aggregates duplicate years, sorts ascending and validates
/// the year bounds and count signs, so every instance satisfies the
/// invariants. Instances are immutable afterwards.
class ChangeDataset {
 public:
  ChangeDataset() = default;
  ChangeDataset(std::string name, std::vector<YearCount> records,
                std::string recessive_label = "recessive",
                std::string innovative_label = "innovative");

  const std::string& name() const noexcept { return name_; }
  const std::string& recessive_label() const noexcept { return recessive_label_; }
  const std::string& innovative_label() const noexcept { return innovative_label_; }
  const std::vector<YearCount>& records() const noexcept { return records_; }

  bool empty() const noexcept { return records_.empty(); }
  int min_year() const;
  int max_year() const;

  // Records with year in [from, to).
  ChangeDataset restricted(int from, int to) const;
  ChangeDataset renamed(std::string name) const;

  // Non-fatal invariant violations (e.g. no innovative attestation at all).
  std::vector<std::string> warnings() const;

  friend bool operator==(const ChangeDataset&, const ChangeDataset&) = default;

 private:
  std::string name_;
  std::string recessive_label_ = "recessive";
  std::string innovative_label_ = "innovative";
  std::vector<YearCount> records_;
};

// Yearly format: header `year,recessive,innovative`.
ChangeDataset parse_yearly_counts(std::istream& source, std::string name);

// Per-text format: header `text_id,year_from,year_to,recessive,innovative`.
ChangeDataset parse_text_records(std::istream& source, std::string name);

// Dispatches on the header line to one of the two parsers above.
ChangeDataset parse_dataset(std::istream& source, std::string name);

// Reads a file; the dataset name defaults to the file stem.
ChangeDataset load_dataset(const std::filesystem::path& path,
                           std::optional<std::string> name = std::nullopt);

ChangeDataset merge_datasets(const ChangeDataset& a, const ChangeDataset& b,
                             std::string name);

Totals total_attestations(const ChangeDataset& ds);

// Writes the yearly format (with label directives), readable by parse_yearly_counts.
void write_yearly_counts(std::ostream& out, const ChangeDataset& ds);

struct DatasetSummary {
  std::string name;
  std::optional<int> min_year;
  std::optional<int> max_year;
  std::size_t year_count = 0;
  Totals totals;
  std::optional<int> first_recessive;
  std::optional<int> last_recessive;
  std::optional<int> first_innovative;
  std::optional<int> last_innovative;
  std::vector<std::string> warnings;
};

DatasetSummary summarize(const ChangeDataset& ds);
void write_summary(std::ostream& out, const DatasetSummary& summary);

}  // namespace piotrowski
