#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using piotrowski::cli::run;

namespace {

std::string fixture(const std::string& name) { return std::string(PIOTROWSKI_FIXTURES_DIR) + "/" + name + ".csv"; }

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("piotrowski_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("validate reports first and last attestations") {
  TempDir dir("validate");
  const auto r = invoke({"validate", fixture("wietszy"), "--out", dir.str()});
  CHECK(r.code == 0);
  CHECK(r.out.find("first innovative: 1543") != std::string::npos);
  CHECK(r.out.find("last recessive: 1825") != std::string::npos);
  CHECK(fs::exists(dir.path / "wietszy_summary.txt"));
  CHECK(fs::exists(dir.path / "manifest_validate.json"));
}

TEST_CASE("fit writes the weighted row with 42 residual df") {
  TempDir dir("fit");
  const auto r = invoke({"fit", fixture("wietszy"), "--out", dir.str()});
  REQUIRE(r.code == 0);
  const auto csv = slurp(dir.path / "wietszy_20w10o_fits.csv");
  std::istringstream lines(csv);
  std::string line;
  bool found = false;
  while (std::getline(lines, line)) {
    if (line.rfind("wietszy,1,weighted,20,10,", 0) == 0) {
      found = true;
      CHECK(line.find(",42,1,0") != std::string::npos);
    }
  }
  CHECK(found);
  CHECK(fs::exists(dir.path / "wietszy_20w10o.svg"));
  CHECK(fs::exists(dir.path / "wietszy_20w10o_bins.csv"));
  const auto manifest = slurp(dir.path / "manifest_fit.json");
  CHECK(manifest.find("\"window\": 20") != std::string::npos);
  CHECK(manifest.find("\"anchor\": 1380") != std::string::npos);
}

TEST_CASE("poly and split commands") {
  TempDir dir("poly");
  const auto poly = invoke({"poly", fixture("inszy"), "--degree", "3", "--out", dir.str()});
  CHECK(poly.code == 0);
  CHECK(poly.out.find("inszy poly3_weighted: Wald test of the degree-3 term") != std::string::npos);
  CHECK(fs::exists(dir.path / "inszy_poly3_20w10o_fits.csv"));
  CHECK(invoke({"split", fixture("abo_albo"), "--at", "1610", "--out", dir.str()}).code == 0);
  CHECK(fs::exists(dir.path / "abo_albo_split1610_20w10o.svg"));
  CHECK(invoke({"split", fixture("abo_albo"), "--at", "1100", "--out", dir.str()}).code == 1);
}

TEST_CASE("grid with no valid combination warns and succeeds") {
  TempDir dir("grid_empty");
  const auto r = invoke({"grid", fixture("wietszy"), "--windows", "10:10:5", "--overlaps", "20:20:5", "--out", dir.str()});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(slurp(dir.path / "grid.csv") == "change,window,overlap,weighting,degree,r2,p_value,converged\n");
}

TEST_CASE("grid, table and composite chain") {
  TempDir dir("chain");
  REQUIRE(invoke({"grid", fixture("wietszy"), fixture("naj"), "--windows", "20:50:30", "--overlaps", "5:20:15",
                  "--out", dir.str()})
              .code == 0);
  CHECK(fs::exists(dir.path / "grid_20o.svg"));
  const auto t = invoke({"table", (dir.path / "grid.csv").string(), "--out", dir.str()});
  CHECK(t.code == 0);
  CHECK(t.out.find("| wietszy |") != std::string::npos);
  CHECK(fs::exists(dir.path / "table1.md"));
  const auto c = invoke({"composite", fixture("wietszy"), fixture("bych") + "+" + fixture("bychmy"), "--out", dir.str()});
  CHECK(c.code == 0);
  CHECK(fs::exists(dir.path / "composite.svg"));
  CHECK(slurp(dir.path / "crossing_offsets.csv").rfind("from,to,offset_years\n", 0) == 0);
}

TEST_CASE("usage and data errors map to exit codes") {
  TempDir dir("errors");
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);
  CHECK(invoke({"fit", fixture("wietszy"), "--bogus"}).code == 1);
  CHECK(invoke({"fit", fixture("wietszy"), "--window", "10", "--overlap", "10", "--out", dir.str()}).code == 1);
  CHECK(invoke({"fit", fixture("wietszy"), "--weighted", "--unweighted"}).code == 1);
  const auto missing = invoke({"validate", (dir.path / "nope.csv").string(), "--out", dir.str()});
  CHECK(missing.code == 2);
  CHECK_FALSE(missing.err.empty());
  fs::create_directories(dir.path);
  std::ofstream(dir.path / "bad.csv") << "year,recessive,innovative\n1500,x,1\n";
  const auto bad = invoke({"validate", (dir.path / "bad.csv").string(), "--out", dir.str()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 2") != std::string::npos);
}

TEST_CASE("a fit that cannot be estimated exits with 3") {
  TempDir dir("fitfail");
  fs::create_directories(dir.path);
  std::ofstream(dir.path / "tiny.csv") << "year,recessive,innovative\n1500,1,0\n1505,0,1\n";
  CHECK(invoke({"fit", (dir.path / "tiny.csv").string(), "--no-raw-yearly", "--out", dir.str()}).code == 3);
}
