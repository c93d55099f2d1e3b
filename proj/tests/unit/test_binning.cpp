#include <random>
#include <sstream>

#include "doctest.h"
#include "piotrowski/binning.hpp"
#include "piotrowski/errors.hpp"

using namespace piotrowski;

namespace {

ChangeDataset texts() { return ChangeDataset("worked", {{1602, 1, 0}, {1618, 0, 1}, {1622, 0, 1}}); }

ChangeDataset random_dataset(std::mt19937_64& rng, int from, int to) {
  std::uniform_int_distribution<Count> count(0, 30);
  std::bernoulli_distribution present(0.6);
  std::vector<YearCount> rows;
  for (int y = from; y < to; ++y) {
    if (present(rng)) rows.push_back({y, count(rng), count(rng) + 1});
  }
  return ChangeDataset("r", rows);
}

}  // namespace

TEST_CASE("worked example, no overlap") {
  const auto s = make_bins(texts(), 20, 0, 1601);
  REQUIRE(s.size() == 2);
  CHECK(s.bins[0].start_year == 1601);
  CHECK(s.bins[0].end_year == 1621);
  CHECK(s.bins[0].recessive == 1);
  CHECK(s.bins[0].innovative == 1);
  CHECK(s.bins[1].start_year == 1621);
  CHECK(s.bins[1].recessive == 0);
  CHECK(s.bins[1].innovative == 1);
}

TEST_CASE("worked example, overlap 10: the 1618 text sits in both straddling bins") {
  const auto s = make_bins(texts(), 20, 10, 1601);
  REQUIRE(s.size() == 3);
  CHECK(s.bins[0].start_year == 1601);
  CHECK(s.bins[0].innovative == 1);
  CHECK(s.bins[1].start_year == 1611);
  CHECK(s.bins[1].end_year == 1631);
  CHECK(s.bins[1].innovative == 2);
  CHECK(s.bins[2].start_year == 1621);
  CHECK(s.bins[2].innovative == 1);
  for (const auto& b : s.bins) CHECK(b.midpoint == doctest::Approx(b.start_year + 10.0));
}

TEST_CASE("single year bin") {
  const auto s = make_bins(ChangeDataset("one", {{1500, 3, 7}}), 10, 0, 1500);
  REQUIRE(s.size() == 1);
  CHECK(s.bins[0].proportion() == doctest::Approx(0.7));
  CHECK(s.bins[0].midpoint == 1505.0);
}

TEST_CASE("default anchor aligns starts to 1380") {
  const auto s = make_bins(ChangeDataset("a", {{1405, 1, 1}, {1466, 2, 0}}), 20, 10);
  REQUIRE_FALSE(s.empty());
  CHECK(s.anchor_year == 1380);
  CHECK(s.bins.front().start_year == 1400);
  for (const auto& b : s.bins) CHECK((b.start_year - 1380) % 10 == 0);
}

TEST_CASE("empty windows are skipped") {
  const auto s = make_bins(ChangeDataset("gap", {{1500, 1, 0}, {1600, 0, 1}}), 10, 0, 1500);
  REQUIRE(s.size() == 2);
  CHECK(s.bins[0].start_year == 1500);
  CHECK(s.bins[1].start_year == 1600);
}

TEST_CASE("invalid window parameters") {
  const auto ds = texts();
  CHECK_THROWS_AS(make_bins(ds, 20, 20), ParameterError);
  CHECK_THROWS_AS(make_bins(ds, 20, 25), ParameterError);
  CHECK_THROWS_AS(make_bins(ds, 0, 0), ParameterError);
  CHECK_THROWS_AS(make_bins(ds, 10, -1), ParameterError);
}

TEST_CASE("raw yearly bins") {
  const auto s = raw_yearly_bins(ChangeDataset("raw", {{1543, 0, 1}, {1600, 5, 5}, {1650, 0, 0}}));
  REQUIRE(s.size() == 2);
  CHECK(s.bins[0].proportion() == 1.0);
  CHECK(s.bins[1].proportion() == 0.5);
  CHECK(s.bins[0].midpoint == 1543.5);
  CHECK(s.window_years == 1);
}

TEST_CASE("bin invariants hold on random data") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ds = random_dataset(rng, 1400, 1700);
    for (int w : {5, 10, 20, 50}) {
      for (int o : {0, w / 2, w - 1}) {
        const auto s = make_bins(ds, w, o);
        for (std::size_t i = 0; i < s.size(); ++i) {
          const auto& b = s.bins[i];
          CHECK(b.end_year - b.start_year == w);
          CHECK(b.trials() > 0);
          CHECK(b.proportion() >= 0.0);
          CHECK(b.proportion() <= 1.0);
          if (i > 0) CHECK((b.start_year - s.bins[i - 1].start_year) % (w - o) == 0);
          if (i > 0) CHECK(b.start_year > s.bins[i - 1].start_year);
        }
      }
    }
  }
}

TEST_CASE("overlap 0 counts every attestation once") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ds = random_dataset(rng, 1390, 1850);
    const auto grand = total_attestations(ds).grand;
    for (int w : {1, 3, 7, 10, 20, 33, 100}) {
      CHECK(make_bins(ds, w, 0).total_trials() == grand);
      CHECK(make_bins(ds, w, 0, 1111).total_trials() == grand);
    }
  }
}

TEST_CASE("interior years are counted window/step times") {
  std::mt19937_64 rng(9);
  const auto ds = random_dataset(rng, 1400, 1800);
  for (auto [w, o] : {std::pair{20, 10}, {20, 15}, {30, 20}, {10, 5}, {50, 25}}) {
    const int step = w - o;
    REQUIRE(w % step == 0);
    const auto s = make_bins(ds, w, o);
    // multiplicity per year, counted directly from the bin edges
    for (const auto& r : ds.records()) {
      if (r.year < ds.min_year() + w || r.year > ds.max_year() - w) continue;
      int covering = 0;
      for (const auto& b : s.bins) covering += (r.year >= b.start_year && r.year < b.end_year);
      CHECK(covering == w / step);
    }
  }
  // a block of data strictly inside the covered range: totals are exact
  const ChangeDataset inner("inner", {{1400, 1, 0}, {1450, 2, 3}, {1460, 4, 1}, {1500, 0, 1}});
  const auto s = make_bins(inner, 20, 10, 1380);
  Count block = 0;
  for (const auto& b : s.bins) {
    if (b.start_year >= 1430 && b.end_year <= 1480) block += b.trials();
  }
  // [1440,1460) [1450,1470) [1460,1480) hold 1450 twice and 1460 twice
  CHECK(block == 2 * 5 + 2 * 5);
}

TEST_CASE("window 1 anchored at the first year equals raw yearly bins") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ds = random_dataset(rng, 1500, 1600);
    const auto a = make_bins(ds, 1, 0, ds.min_year());
    const auto b = raw_yearly_bins(ds);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.bins[i].start_year == b.bins[i].start_year);
      CHECK(a.bins[i].midpoint == b.bins[i].midpoint);
      CHECK(a.bins[i].recessive == b.bins[i].recessive);
      CHECK(a.bins[i].innovative == b.bins[i].innovative);
    }
  }
}

TEST_CASE("proportions are invariant under count scaling") {
  std::mt19937_64 rng(17);
  const auto ds = random_dataset(rng, 1450, 1650);
  std::vector<YearCount> scaled = ds.records();
  for (auto& r : scaled) {
    r.recessive *= 7;
    r.innovative *= 7;
  }
  const auto a = make_bins(ds, 20, 10);
  const auto b = make_bins(ChangeDataset("x", scaled), 20, 10);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.bins[i].proportion() == doctest::Approx(b.bins[i].proportion()).epsilon(1e-15));
    CHECK(b.bins[i].trials() == 7 * a.bins[i].trials());
  }
}

TEST_CASE("wietszy fixture: 202 raw years, 44 default bins") {
  const auto ds = load_dataset(std::string(PIOTROWSKI_FIXTURES_DIR) + "/wietszy.csv");
  CHECK(raw_yearly_bins(ds).size() == 202);
  CHECK(make_bins(ds, 20, 10).size() == 44);
}

TEST_CASE("bins CSV export") {
  std::ostringstream out;
  write_bins_csv(out, make_bins(texts(), 20, 0, 1601));
  const auto text = out.str();
  CHECK(text.rfind("start,end,midpoint,recessive,innovative,proportion\n", 0) == 0);
  CHECK(text.find("1601,1621,1611.0,1,1,0.500000") != std::string::npos);
}
