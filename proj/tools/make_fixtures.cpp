// Writes the synthetic change datasets used by the reproduction tests.
//
//   make_fixtures <output-dir>
//
// Totals match the attestation counts of the nine studied changes; shapes
// (timing, slope, blur) are hand-picked approximations of the published
// figures. Output is deterministic for a given standard library.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <vector>

#include "piotrowski/dataset.hpp"
#include "piotrowski/synthetic.hpp"

namespace fs = std::filesystem;
using namespace piotrowski;
using synthetic::ChangeSpec;

namespace {

constexpr int kNever = std::numeric_limits<int>::max();

void write(const fs::path& dir, const ChangeDataset& ds) {
  std::ofstream out(dir / (ds.name() + ".csv"), std::ios::binary);
  out << "# synthetic fixture generated by make_fixtures\n";
  write_yearly_counts(out, ds);
}

ChangeDataset finish(const ChangeSpec& spec, std::vector<YearCount> records) {
  return ChangeDataset(spec.name, std::move(records), spec.recessive_label, spec.innovative_label);
}

ChangeDataset wietszy() {
  ChangeSpec s;
  s.name = "wietszy";
  s.recessive_label = "wietszy";
  s.innovative_label = "wiekszy";
  s.first_year = 1400;
  s.last_year = 1839;
  // raw-year logit -82.238 + 0.049 t, i.e. 4.9 per century around 1678.3
  s.origin = 82.238 / 0.049;
  s.logit_coeffs = {0.0, 4.9};
  s.total = 9158;
  s.text_years = 202;
  s.growth = 1.3;
  s.noise_sd = 0.35;
  s.required_years = {1543, 1825};
  s.seed = 11;
  auto r = synthetic::generate_records(s);
  synthetic::set_innovative_total(r, 0, 1543, 0);
  synthetic::ensure_innovative(r, 1543);
  for (auto& y : r) {
    if (y.year >= 1746 && y.year != 1825) {
      y.innovative += y.recessive;
      y.recessive = 0;
    }
  }
  synthetic::ensure_recessive(r, 1825);
  return finish(s, std::move(r));
}

ChangeDataset barzo() {
  ChangeSpec s;
  s.name = "barzo";
  s.recessive_label = "barzo";
  s.innovative_label = "bardzo";
  s.first_year = 1390;
  s.last_year = 1849;
  s.origin = 1745;
  s.logit_coeffs = {0.0, 3.6};
  s.total = 17938;
  s.text_years = 320;
  s.growth = 1.0;
  s.noise_sd = 0.45;
  s.segments = {{1000, 1600, 2213 + 25}};
  s.seed = 12;
  auto r = synthetic::generate_records(s);
  synthetic::set_innovative_total(r, 1000, 1600, 25);
  return finish(s, std::move(r));
}

ChangeDataset bych() {
  ChangeSpec s;
  s.name = "bych";
  s.recessive_label = "-bych";
  s.innovative_label = "-bym";
  s.first_year = 1400;
  s.last_year = 1760;
  s.origin = 1540;
  s.logit_coeffs = {0.0, 7.5};
  s.total = 7491;
  s.text_years = 170;
  s.growth = 1.1;
  s.noise_sd = 0.3;
  s.seed = 13;
  return synthetic::generate(s);
}

ChangeDataset bychmy() {
  ChangeSpec s;
  s.name = "bychmy";
  s.recessive_label = "-bychmy";
  s.innovative_label = "-bysmy";
  s.first_year = 1420;
  s.last_year = 1780;
  s.origin = 1570;
  s.logit_coeffs = {0.0, 5.0};
  s.total = 2585;
  s.text_years = 140;
  s.growth = 0.9;
  s.noise_sd = 0.8;
  s.segments = {{1450, 1460, 7}, {1600, 1610, 451}};
  s.seed = 14;
  return synthetic::generate(s);
}

ChangeDataset naj() {
  ChangeSpec s;
  s.name = "naj";
  s.recessive_label = "na-";
  s.innovative_label = "naj-";
  s.first_year = 1400;
  s.last_year = 1849;
  s.origin = 1610;
  s.logit_coeffs = {0.0, 2.4};
  s.total = 8832;
  s.text_years = 260;
  s.growth = 1.0;
  s.noise_sd = 0.5;
  s.required_years = {1535, 1772};
  s.seed = 15;
  auto r = synthetic::generate_records(s);
  // thin fifteenth-century texts carry a scatter of innovative forms (30%);
  // none again until 1535
  synthetic::set_innovative_total(r, 1400, 1500, [&] {
    Count t = 0;
    for (const auto& y : r) {
      if (y.year < 1500) t += y.trials();
    }
    return t * 3 / 10;
  }());
  synthetic::set_innovative_total(r, 1500, 1535, 0);
  synthetic::ensure_innovative(r, 1535);
  synthetic::set_innovative_total(r, 1773, kNever, [&] {
    Count t = 0;
    for (const auto& y : r) {
      if (y.year >= 1773) t += y.trials();
    }
    return t;
  }());
  synthetic::ensure_recessive(r, 1772);
  return finish(s, std::move(r));
}

ChangeDataset ir_er() {
  ChangeSpec s;
  s.name = "ir_er";
  s.recessive_label = "-ir-";
  s.innovative_label = "-er-";
  s.first_year = 1390;
  s.last_year = 1849;
  s.origin = 1450;
  s.logit_coeffs = {0.5, 3.0};
  s.total = 49829;
  s.text_years = 380;
  s.growth = 1.1;
  s.noise_sd = 0.9;
  s.seed = 16;
  return synthetic::generate(s);
}

ChangeDataset inszy() {
  ChangeSpec s;
  s.name = "inszy";
  s.recessive_label = "inszy";
  s.innovative_label = "inny";
  s.first_year = 1400;
  s.last_year = 1849;
  s.origin = 1600;
  s.logit_coeffs = {-1.0, 0.6, 0.0, 1.5};
  s.total = 25103;
  s.text_years = 330;
  s.growth = 1.0;
  s.noise_sd = 0.7;
  s.seed = 17;
  return synthetic::generate(s);
}

ChangeDataset wszytek() {
  ChangeSpec s;
  s.name = "wszytek";
  s.recessive_label = "wszytek";
  s.innovative_label = "wszystek";
  s.first_year = 1390;
  s.last_year = 1849;
  s.origin = 1620;
  s.logit_coeffs = {-0.4, 1.0, -0.3, 0.8};
  s.total = 55005;
  s.text_years = 400;
  s.growth = 1.0;
  s.noise_sd = 1.0;
  s.seed = 18;
  return synthetic::generate(s);
}

ChangeDataset abo_albo() {
  ChangeSpec s;
  s.name = "abo_albo";
  s.recessive_label = "abo";
  s.innovative_label = "albo";
  s.first_year = 1390;
  s.last_year = 1849;
  s.origin = 1640;
  s.logit_coeffs = {-2.2, 1.2, 1.6};
  s.total = 44743;
  s.text_years = 380;
  s.growth = 1.0;
  s.noise_sd = 0.6;
  s.seed = 19;
  return synthetic::generate(s);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output-dir>\n";
    return 1;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  for (const auto& ds : {wietszy(), barzo(), bych(), bychmy(), naj(), ir_er(), inszy(), wszytek(), abo_albo()}) {
    write(dir, ds);
    const auto t = total_attestations(ds);
    std::cout << ds.name() << ": " << ds.records().size() << " years, " << t.grand << " attestations\n";
  }
  return 0;
}
