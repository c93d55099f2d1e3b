#include "piotrowski/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <string_view>

#include <fmt/format.h>

#include "piotrowski/errors.hpp"

namespace piotrowski {
namespace {

constexpr std::string_view kYearlyHeader = "year,recessive,innovative";
constexpr std::string_view kTextHeader = "text_id,year_from,year_to,recessive,innovative";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

template <typename Int>
Int parse_int(std::string_view field, std::size_t line, std::string_view column) {
  Int value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError(line, fmt::format("column '{}': '{}' is not an integer", column, field));
  }
  return value;
}

Count parse_count(std::string_view field, std::size_t line, std::string_view column) {
  const auto value = parse_int<Count>(field, line, column);
  if (value < 0) {
    throw ParseError(line, fmt::format("column '{}': negative count {}", column, value));
  }
  return value;
}

// Line-oriented reader shared by both formats: strips BOM and CR, skips blank
// and `#` lines, and collects `# key: value` directives on the way.
class CsvLines {
 public:
  explicit CsvLines(std::istream& in) : in_(in) {}

  // Next data line (header included); false at end of stream.
  bool next(std::string_view& out) {
    while (std::getline(in_, buffer_)) {
      ++line_;
      std::string_view view = buffer_;
      if (line_ == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
      view = trim(view);
      if (view.empty()) continue;
      if (view.front() == '#') {
        read_directive(view.substr(1));
        continue;
      }
      out = view;
      return true;
    }
    return false;
  }

  std::size_t line() const noexcept { return line_; }
  const std::map<std::string, std::string, std::less<>>& directives() const { return directives_; }

 private:
  void read_directive(std::string_view body) {
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) return;
    const auto key = trim(body.substr(0, colon));
    const auto value = trim(body.substr(colon + 1));
    if (key == "name" || key == "recessive" || key == "innovative") {
      directives_[std::string(key)] = std::string(value);
    }
  }

  std::istream& in_;
  std::string buffer_;
  std::size_t line_ = 0;
  std::map<std::string, std::string, std::less<>> directives_;
};

std::string directive_or(const CsvLines& lines, std::string_view key, std::string fallback) {
  const auto& d = lines.directives();
  if (auto it = d.find(key); it != d.end() && !it->second.empty()) return it->second;
  return fallback;
}

std::vector<YearCount> read_yearly_body(CsvLines& lines) {
  std::vector<YearCount> rows;
  std::string_view line;
  while (lines.next(line)) {
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw ParseError(lines.line(), fmt::format("expected 3 columns, found {}", fields.size()));
    }
    rows.push_back({parse_int<int>(fields[0], lines.line(), "year"),
                    parse_count(fields[1], lines.line(), "recessive"),
                    parse_count(fields[2], lines.line(), "innovative")});
  }
  return rows;
}

std::vector<YearCount> read_text_body(CsvLines& lines) {
  std::vector<YearCount> rows;
  std::string_view line;
  while (lines.next(line)) {
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw ParseError(lines.line(), fmt::format("expected 5 columns, found {}", fields.size()));
    }
    TextRecord text{std::string(fields[0]), parse_int<int>(fields[1], lines.line(), "year_from"),
                    parse_int<int>(fields[2], lines.line(), "year_to"),
                    parse_count(fields[3], lines.line(), "recessive"),
                    parse_count(fields[4], lines.line(), "innovative")};
    if (text.year_from > text.year_to) {
      throw DataError(fmt::format("text '{}' (line {}): year_from {} > year_to {}", text.text_id,
                                  lines.line(), text.year_from, text.year_to));
    }
    rows.push_back({text.assigned_year(), text.recessive, text.innovative});
  }
  return rows;
}

ChangeDataset finish(CsvLines& lines, std::vector<YearCount> rows, std::string name) {
  if (rows.empty()) throw DataError(fmt::format("dataset '{}' has no data rows", name));
  return ChangeDataset(directive_or(lines, "name", std::move(name)), std::move(rows),
                       directive_or(lines, "recessive", "recessive"),
                       directive_or(lines, "innovative", "innovative"));
}

void expect_header(CsvLines& lines, std::string_view expected, const std::string& name) {
  std::string_view header;
  if (!lines.next(header)) throw DataError(fmt::format("dataset '{}' is empty", name));
  std::string normalized;
  for (auto f : split_fields(header)) {
    if (!normalized.empty()) normalized += ',';
    normalized += f;
  }
  if (normalized != expected) {
    throw ParseError(lines.line(), fmt::format("expected header '{}', found '{}'", expected, header));
  }
}

}  // namespace

int TextRecord::assigned_year() const noexcept {
  const int sum = year_from + year_to;
  // floor division, also for negative sums
  return sum >= 0 ? sum / 2 : -((-sum + 1) / 2);
}

ChangeDataset::ChangeDataset(std::string name, std::vector<YearCount> records,
                             std::string recessive_label, std::string innovative_label)
    : name_(std::move(name)),
      recessive_label_(std::move(recessive_label)),
      innovative_label_(std::move(innovative_label)) {
  std::map<int, YearCount> by_year;
  for (const auto& r : records) {
    if (r.year < kMinYear || r.year > kMaxYear) {
      throw DataError(fmt::format("dataset '{}': year {} outside [{}, {}]", name_, r.year,
                                  kMinYear, kMaxYear));
    }
    if (r.recessive < 0 || r.innovative < 0) {
      throw DataError(fmt::format("dataset '{}': negative count in year {}", name_, r.year));
    }
    auto& slot = by_year[r.year];
    slot.year = r.year;
    slot.recessive += r.recessive;
    slot.innovative += r.innovative;
  }
  records_.reserve(by_year.size());
  for (const auto& [year, rc] : by_year) records_.push_back(rc);
}

int ChangeDataset::min_year() const {
  if (records_.empty()) throw DataError(fmt::format("dataset '{}' is empty", name_));
  return records_.front().year;
}

int ChangeDataset::max_year() const {
  if (records_.empty()) throw DataError(fmt::format("dataset '{}' is empty", name_));
  return records_.back().year;
}

ChangeDataset ChangeDataset::restricted(int from, int to) const {
  ChangeDataset out = *this;
  std::erase_if(out.records_, [&](const YearCount& r) { return r.year < from || r.year >= to; });
  return out;
}

ChangeDataset ChangeDataset::renamed(std::string name) const {
  ChangeDataset out = *this;
  out.name_ = std::move(name);
  return out;
}

std::vector<std::string> ChangeDataset::warnings() const {
  std::vector<std::string> out;
  const bool any_recessive =
      std::any_of(records_.begin(), records_.end(), [](const auto& r) { return r.recessive > 0; });
  const bool any_innovative =
      std::any_of(records_.begin(), records_.end(), [](const auto& r) { return r.innovative > 0; });
  if (!any_recessive) out.push_back(fmt::format("{}: no recessive attestations", name_));
  if (!any_innovative) out.push_back(fmt::format("{}: no innovative attestations", name_));
  return out;
}

ChangeDataset parse_yearly_counts(std::istream& source, std::string name) {
  CsvLines lines(source);
  expect_header(lines, kYearlyHeader, name);
  auto rows = read_yearly_body(lines);
  return finish(lines, std::move(rows), std::move(name));
}

ChangeDataset parse_text_records(std::istream& source, std::string name) {
  CsvLines lines(source);
  expect_header(lines, kTextHeader, name);
  auto rows = read_text_body(lines);
  return finish(lines, std::move(rows), std::move(name));
}

ChangeDataset parse_dataset(std::istream& source, std::string name) {
  CsvLines lines(source);
  std::string_view header;
  if (!lines.next(header)) throw DataError(fmt::format("dataset '{}' is empty", name));
  const auto fields = split_fields(header);
  std::vector<YearCount> rows;
  if (fields.size() == 3 && fields[0] == "year") {
    if (!(fields[1] == "recessive" && fields[2] == "innovative")) {
      throw ParseError(lines.line(), fmt::format("expected header '{}'", kYearlyHeader));
    }
    rows = read_yearly_body(lines);
  } else if (fields.size() == 5 && fields[0] == "text_id") {
    if (!(fields[1] == "year_from" && fields[2] == "year_to" && fields[3] == "recessive" &&
          fields[4] == "innovative")) {
      throw ParseError(lines.line(), fmt::format("expected header '{}'", kTextHeader));
    }
    rows = read_text_body(lines);
  } else {
    throw ParseError(lines.line(), fmt::format("unrecognized header '{}'", header));
  }
  return finish(lines, std::move(rows), std::move(name));
}

ChangeDataset load_dataset(const std::filesystem::path& path, std::optional<std::string> name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  auto ds = parse_dataset(in, path.stem().string());
  // an explicit name beats the file's `# name:` directive
  return name ? ds.renamed(std::move(*name)) : ds;
}

ChangeDataset merge_datasets(const ChangeDataset& a, const ChangeDataset& b, std::string name) {
  std::vector<YearCount> all = a.records();
  all.insert(all.end(), b.records().begin(), b.records().end());
  return ChangeDataset(std::move(name), std::move(all), a.recessive_label(), a.innovative_label());
}

Totals total_attestations(const ChangeDataset& ds) {
  Totals t;
  for (const auto& r : ds.records()) {
    t.recessive += r.recessive;
    t.innovative += r.innovative;
  }
  t.grand = t.recessive + t.innovative;
  return t;
}

void write_yearly_counts(std::ostream& out, const ChangeDataset& ds) {
  out << "# name: " << ds.name() << '\n'
      << "# recessive: " << ds.recessive_label() << '\n'
      << "# innovative: " << ds.innovative_label() << '\n'
      << kYearlyHeader << '\n';
  for (const auto& r : ds.records()) {
    out << r.year << ',' << r.recessive << ',' << r.innovative << '\n';
  }
}

DatasetSummary summarize(const ChangeDataset& ds) {
  DatasetSummary s;
  s.name = ds.name();
  s.year_count = ds.records().size();
  s.totals = total_attestations(ds);
  s.warnings = ds.warnings();
  if (!ds.empty()) {
    s.min_year = ds.min_year();
    s.max_year = ds.max_year();
  }
  for (const auto& r : ds.records()) {
    if (r.recessive > 0) {
      if (!s.first_recessive) s.first_recessive = r.year;
      s.last_recessive = r.year;
    }
    if (r.innovative > 0) {
      if (!s.first_innovative) s.first_innovative = r.year;
      s.last_innovative = r.year;
    }
  }
  return s;
}

void write_summary(std::ostream& out, const DatasetSummary& s) {
  auto year = [](const std::optional<int>& y) { return y ? std::to_string(*y) : std::string("-"); };
  out << "dataset: " << s.name << '\n'
      << "years: " << year(s.min_year) << "-" << year(s.max_year) << " (" << s.year_count
      << " distinct)\n"
      << "recessive total: " << s.totals.recessive << '\n'
      << "innovative total: " << s.totals.innovative << '\n'
      << "grand total: " << s.totals.grand << '\n'
      << "first recessive: " << year(s.first_recessive) << '\n'
      << "last recessive: " << year(s.last_recessive) << '\n'
      << "first innovative: " << year(s.first_innovative) << '\n'
      << "last innovative: " << year(s.last_innovative) << '\n';
  for (const auto& w : s.warnings) out << "warning: " << w << '\n';
}

}  // namespace piotrowski
