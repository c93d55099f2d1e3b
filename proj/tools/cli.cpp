#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "piotrowski/piotrowski.hpp"

namespace piotrowski::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Options {
  std::vector<std::string> inputs;
  fs::path out_dir = "out";
  int window = 20;
  int overlap = 10;
  int anchor = kDefaultAnchorYear;
  int degree = 1;
  bool only_weighted = false;
  bool only_unweighted = false;
  bool both = false;
  bool raw_yearly = true;
  std::string radius = "constant";
  int split_at = 0;
  std::string windows = "5:100:5";
  std::string overlaps = "5:100:5";
  std::vector<int> plot_overlaps = {10, 20};
  std::vector<std::string> poly;
  std::vector<std::string> cells;
  std::string table_weighting = "unweighted";
};

// Failure raised by a command after its outputs are written.
struct FitFailure {
  std::string message;
};

class Session {
 public:
  Session(const Options& opt, std::string command, std::span<const std::string> args, std::ostream& out,
          std::ostream& err)
      : opt_(opt), command_(std::move(command)), args_(args.begin(), args.end()), out_(out), err_(err) {}

  int execute() {
    fs::create_directories(opt_.out_dir);
    static const std::map<std::string, void (Session::*)(), std::less<>> commands = {
        {"fit", &Session::fit},           {"poly", &Session::poly},   {"split", &Session::split},
        {"grid", &Session::grid},         {"composite", &Session::composite},
        {"table", &Session::table},       {"validate", &Session::validate},
    };
    (this->*commands.at(command_))();
    write_manifest();
    if (failure_) {
      err_ << "error: " << failure_->message << '\n';
      return kFitFailure;
    }
    return kSuccess;
  }

 private:
  AnalysisConfig config() const {
    AnalysisConfig cfg;
    cfg.window_years = opt_.window;
    cfg.overlap_years = opt_.overlap;
    cfg.anchor_year = opt_.anchor;
    cfg.degree = 1;
    cfg.weighted = !opt_.only_unweighted;
    cfg.unweighted = !opt_.only_weighted;
    cfg.include_raw_yearly = opt_.raw_yearly;
    return cfg;
  }

  std::vector<Weighting> weightings() const {
    if (opt_.only_weighted) return {Weighting::Weighted};
    if (opt_.only_unweighted) return {Weighting::Unweighted};
    return {Weighting::Weighted, Weighting::Unweighted};
  }

  std::string weighting_label() const {
    if (opt_.only_weighted) return "weighted";
    if (opt_.only_unweighted) return "unweighted";
    return "both";
  }

  PlotSpec plot_spec() const {
    PlotSpec spec;
    spec.radius_mode = opt_.radius == "log" ? RadiusMode::LogAttestations : RadiusMode::Constant;
    return spec;
  }

  // `a.csv+b.csv` merges the listed files into one change.
  ChangeDataset load(const std::string& arg) {
    std::vector<std::string> parts;
    std::stringstream ss(arg);
    for (std::string p; std::getline(ss, p, '+');) parts.push_back(p);
    ChangeDataset ds = load_dataset(parts.at(0));
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const ChangeDataset next = load_dataset(parts[i]);
      ds = merge_datasets(ds, next, ds.name() + "+" + next.name());
    }
    for (const auto& w : ds.warnings()) err_ << "warning: " << w << '\n';
    return ds;
  }

  fs::path output(const std::string& name) {
    outputs_.push_back(name);
    return opt_.out_dir / name;
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream f(output(name), std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write '{}'", (opt_.out_dir / name).string()));
    f << text;
  }

  std::string window_tag() const { return fmt::format("{}w{}o", opt_.window, opt_.overlap); }

  void write_fits(const std::string& name, std::span<const ChangeAnalysis> analyses) {
    int max_degree = 1;
    for (const auto& a : analyses) {
      for (const auto& f : a.fits) {
        if (f.fit) max_degree = std::max(max_degree, f.fit->degree);
      }
    }
    std::string csv = fit_csv_header(max_degree) + '\n';
    for (const auto& a : analyses) {
      for (const auto& f : a.fits) {
        if (f.fit) {
          csv += fit_csv_row(a.change, *f.fit, max_degree) + '\n';
          out_ << fmt::format("{} {}: R2={} p={:.3g} df={}{}{}\n", a.change, f.label,
                              format_r2(f.fit->mcfadden_r2), f.fit->p_value, f.fit->df_residual,
                              f.fit->converged ? "" : " (not converged)",
                              f.fit->separation ? " (separation)" : "");
        } else {
          err_ << fmt::format("{} {}: fit failed: {}\n", a.change, f.label, f.error);
          record_failure(fmt::format("{} {}: {}", a.change, f.label, f.error));
        }
      }
    }
    write_text(name, csv);
  }

  void record_failure(std::string message) {
    if (!failure_) failure_ = FitFailure{std::move(message)};
  }

  void render(const std::string& name, std::span<const ChangeAnalysis> analyses) {
    try {
      render_change_plot(analyses, plot_spec()).save(output(name));
    } catch (const DataError& e) {
      outputs_.pop_back();
      record_failure(e.what());
    }
  }

  void single_input(std::string_view what) const {
    if (opt_.inputs.size() != 1) {
      throw ParameterError(fmt::format("{} takes exactly one dataset", what));
    }
  }

  void fit() {
    single_input("fit");
    const ChangeDataset ds = load(opt_.inputs[0]);
    inputs_.push_back(opt_.inputs[0]);
    const ChangeAnalysis a = analyze_change(ds, config());
    std::ostringstream bins;
    write_bins_csv(bins, a.series);
    write_text(fmt::format("{}_{}_bins.csv", ds.name(), window_tag()), bins.str());
    write_fits(fmt::format("{}_{}_fits.csv", ds.name(), window_tag()), std::span(&a, 1));
    render(fmt::format("{}_{}.svg", ds.name(), window_tag()), std::span(&a, 1));
  }

  void poly() {
    single_input("poly");
    if (opt_.degree < 2) throw ParameterError("poly needs --degree >= 2");
    const ChangeDataset ds = load(opt_.inputs[0]);
    inputs_.push_back(opt_.inputs[0]);
    AnalysisConfig cfg = config();
    const ChangeAnalysis a = analyze_polynomial(ds, opt_.degree, cfg);
    const auto stem = fmt::format("{}_poly{}_{}", ds.name(), opt_.degree, window_tag());
    write_fits(stem + "_fits.csv", std::span(&a, 1));
    render(stem + ".svg", std::span(&a, 1));
    for (const auto& f : a.fits) {
      if (!f.fit || f.fit->degree != opt_.degree) continue;
      try {
        const auto t = wald_highest_order(*f.fit, a.series);
        out_ << fmt::format("{} {}: Wald test of the degree-{} term: z^2={:.4g} p={:.3g}\n", a.change, f.label,
                            opt_.degree, t.statistic, t.p_value);
      } catch (const FitError& e) {
        err_ << fmt::format("warning: {} {}: no Wald test ({})\n", a.change, f.label, e.what());
      }
    }
  }

  void split() {
    single_input("split");
    const ChangeDataset ds = load(opt_.inputs[0]);
    inputs_.push_back(opt_.inputs[0]);
    const auto [before, after] = split_fit(ds, opt_.split_at, config());
    const std::vector<ChangeAnalysis> parts = {before, after};
    const auto stem = fmt::format("{}_split{}_{}", ds.name(), opt_.split_at, window_tag());
    write_fits(stem + "_fits.csv", parts);
    render(stem + ".svg", parts);
  }

  void grid() {
    if (opt_.inputs.empty()) throw ParameterError("grid needs at least one dataset");
    const auto windows = parse_range(opt_.windows);
    const auto overlaps = parse_range(opt_.overlaps);
    GridOptions go;
    go.anchor_year = opt_.anchor;
    go.threads = thread_setting();
    std::vector<GridResult> results;
    for (const auto& input : opt_.inputs) {
      const ChangeDataset ds = load(input);
      inputs_.push_back(input);
      for (auto w : weightings()) results.push_back(grid_search(ds, windows, overlaps, w, opt_.degree, go));
    }
    std::size_t entries = 0;
    for (const auto& r : results) entries += r.entries.size();
    if (entries == 0) err_ << "warning: no valid (window, overlap) combination; overlap must be < window\n";

    std::ostringstream csv;
    write_grid_csv(csv, results);
    write_text("grid.csv", csv.str());

    // plots use the unweighted sweep when available
    std::vector<GridResult> plotted;
    for (const auto& r : results) {
      if (r.weighting == Weighting::Unweighted || opt_.only_weighted) plotted.push_back(r);
    }
    for (int o : opt_.plot_overlaps) {
      std::optional<FigureDocument> figure;
      try {
        figure = render_grid_plot(plotted, o);
      } catch (const DataError&) {
        continue;  // nothing at this overlap
      }
      figure->save(output(fmt::format("grid_{}o.svg", o)));
    }
    out_ << fmt::format("{} grid entries written to {}\n", entries, (opt_.out_dir / "grid.csv").string());
  }

  void composite() {
    if (opt_.inputs.size() < 2) throw ParameterError("composite needs at least two datasets");
    std::map<std::string, int, std::less<>> poly_degree;
    for (const auto& p : opt_.poly) {
      const auto colon = p.rfind(':');
      if (colon == std::string::npos) throw ParameterError(fmt::format("--poly '{}' is not NAME:DEGREE", p));
      poly_degree[p.substr(0, colon)] = parse_range(p.substr(colon + 1)).at(0);
    }
    AnalysisConfig cfg = config();
    cfg.include_raw_yearly = false;
    std::vector<ChangeAnalysis> analyses;
    for (const auto& input : opt_.inputs) {
      const ChangeDataset ds = load(input);
      inputs_.push_back(input);
      const auto it = poly_degree.find(ds.name());
      analyses.push_back(it != poly_degree.end() ? analyze_polynomial(ds, it->second, cfg)
                                                 : analyze_change(ds, cfg));
    }
    const CompositeModel model = piotrowski::composite(analyses);
    if (model.curves.size() < 2) {
      record_failure("composite needs at least two successful fits");
      return;
    }
    render_composite_plot(model).save(output("composite.svg"));
    std::ostringstream offsets;
    write_offsets_csv(offsets, model);
    write_text("crossing_offsets.csv", offsets.str());
    out_ << offsets.str();
  }

  void table() {
    if (opt_.inputs.empty()) throw ParameterError("table needs at least one grid CSV");
    const auto weighting = parse_weighting(opt_.table_weighting);
    if (!weighting) throw ParameterError(fmt::format("unknown weighting '{}'", opt_.table_weighting));
    std::vector<std::pair<int, int>> cells;
    for (const auto& c : opt_.cells) {
      const auto comma = c.find(',');
      if (comma == std::string::npos) throw ParameterError(fmt::format("cell '{}' is not WINDOW,OVERLAP", c));
      cells.emplace_back(parse_range(c.substr(0, comma)).at(0), parse_range(c.substr(comma + 1)).at(0));
    }
    std::vector<GridResult> results;
    for (const auto& input : opt_.inputs) {
      std::ifstream in(input, std::ios::binary);
      if (!in) throw DataError(fmt::format("cannot open '{}'", input));
      inputs_.push_back(input);
      for (auto& r : read_grid_csv(in)) {
        if (r.weighting == *weighting && r.degree == opt_.degree) results.push_back(std::move(r));
      }
    }
    const TableText t = emit_table(results, cells);
    for (const auto& w : t.warnings) err_ << "warning: " << w << '\n';
    write_text("table1.md", t.markdown);
    write_text("table1.csv", t.csv);
    out_ << t.markdown;
  }

  void validate() {
    if (opt_.inputs.empty()) throw ParameterError("validate needs at least one dataset");
    for (const auto& input : opt_.inputs) {
      const ChangeDataset ds = load(input);
      inputs_.push_back(input);
      std::ostringstream text;
      write_summary(text, summarize(ds));
      out_ << text.str();
      write_text(fmt::format("{}_summary.txt", ds.name()), text.str());
    }
  }

  unsigned thread_setting() const {
    if (const char* env = std::getenv("PIOTROWSKI_THREADS"); env && *env) {
      const auto v = parse_range(env).at(0);
      if (v < 0) throw ParameterError("PIOTROWSKI_THREADS must be >= 0");
      return static_cast<unsigned>(v);
    }
    return 0;
  }

  void write_manifest() {
    json m;
    m["tool"] = kToolName;
    m["version"] = kVersion;
    m["command"] = command_;
    m["arguments"] = args_;
    m["inputs"] = inputs_;
    m["config"] = {{"window", opt_.window},   {"overlap", opt_.overlap},
                   {"anchor", opt_.anchor},   {"degree", opt_.degree},
                   {"weighting", weighting_label()}, {"raw_yearly", opt_.raw_yearly}};
    if (command_ == "split") m["config"]["split_at"] = opt_.split_at;
    if (command_ == "grid") {
      m["config"]["windows"] = opt_.windows;
      m["config"]["overlaps"] = opt_.overlaps;
    }
    m["out"] = opt_.out_dir.generic_string();
    m["outputs"] = outputs_;
    std::ofstream f(opt_.out_dir / fmt::format("manifest_{}.json", command_), std::ios::binary);
    f << m.dump(2) << '\n';
  }

  const Options& opt_;
  std::string command_;
  std::vector<std::string> args_;
  std::ostream& out_;
  std::ostream& err_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::optional<FitFailure> failure_;
};

void add_binning_flags(CLI::App* sub, Options& opt) {
  sub->add_option("--window", opt.window, "window size in years")->capture_default_str();
  sub->add_option("--overlap", opt.overlap, "overlap of adjacent windows in years")->capture_default_str();
  sub->add_option("--anchor", opt.anchor, "year the window lattice is aligned to")->capture_default_str();
}

void add_weighting_flags(CLI::App* sub, Options& opt) {
  auto* w = sub->add_flag("--weighted", opt.only_weighted, "fit with prior weights only");
  auto* u = sub->add_flag("--unweighted", opt.only_unweighted, "fit without weights only");
  auto* b = sub->add_flag("--both", opt.both, "fit both weightings (default)");
  w->excludes(u)->excludes(b);
  u->excludes(b);
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Logistic models of competing linguistic forms over time", std::string(kToolName)};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", std::string(kVersion));
  app.footer(
      "Ranges use start:end:step, end inclusive when aligned. A dataset argument a.csv+b.csv\n"
      "merges the files into one change. PIOTROWSKI_THREADS caps grid parallelism (0 = auto).");

  auto* fit = app.add_subcommand("fit", "weighted/unweighted logistic fits, raw-year fits and plot");
  fit->add_option("data", opt.inputs, "dataset CSV")->required();
  add_binning_flags(fit, opt);
  add_weighting_flags(fit, opt);
  fit->add_flag("--raw-yearly,!--no-raw-yearly", opt.raw_yearly, "also fit one-year raw bins (default on)");
  fit->add_option("--radius", opt.radius, "point size: constant or log")
      ->check(CLI::IsMember({"constant", "log"}))
      ->capture_default_str();
  add_common(fit, opt);

  auto* poly = app.add_subcommand("poly", "polynomial logistic fits and plot");
  poly->add_option("data", opt.inputs, "dataset CSV")->required();
  poly->add_option("--degree", opt.degree, "polynomial degree (>= 2)")->required();
  add_binning_flags(poly, opt);
  add_weighting_flags(poly, opt);
  poly->add_flag("--raw-yearly,!--no-raw-yearly", opt.raw_yearly, "also fit one-year raw bins (default on)");
  poly->add_option("--radius", opt.radius, "point size: constant or log")->check(CLI::IsMember({"constant", "log"}));
  add_common(poly, opt);

  auto* split = app.add_subcommand("split", "independent fits before and after a split year");
  split->add_option("data", opt.inputs, "dataset CSV")->required();
  split->add_option("--at", opt.split_at, "first year of the second part")->required();
  add_binning_flags(split, opt);
  add_weighting_flags(split, opt);
  split->add_option("--radius", opt.radius, "point size: constant or log")->check(CLI::IsMember({"constant", "log"}));
  add_common(split, opt);

  auto* grid = app.add_subcommand("grid", "goodness of fit over window/overlap combinations");
  grid->add_option("data", opt.inputs, "dataset CSVs")->required();
  grid->add_option("--windows", opt.windows, "window sizes, start:end:step")->capture_default_str();
  grid->add_option("--overlaps", opt.overlaps, "overlaps, start:end:step")->capture_default_str();
  grid->add_option("--degree", opt.degree, "polynomial degree")->capture_default_str();
  grid->add_option("--anchor", opt.anchor, "year the window lattice is aligned to")->capture_default_str();
  grid->add_option("--plot-overlaps", opt.plot_overlaps, "overlaps to plot")->capture_default_str();
  add_weighting_flags(grid, opt);
  add_common(grid, opt);

  auto* comp = app.add_subcommand("composite", "all changes on one axis with crossing offsets");
  comp->add_option("data", opt.inputs, "dataset CSVs")->required();
  comp->add_option("--poly", opt.poly, "NAME:DEGREE draws NAME from its weighted polynomial fit");
  add_binning_flags(comp, opt);
  add_common(comp, opt);

  auto* table = app.add_subcommand("table", "R2 table from grid CSVs");
  table->add_option("grids", opt.inputs, "grid CSVs")->required();
  opt.cells = {"50,20", "20,5"};
  table->add_option("--cells", opt.cells, "WINDOW,OVERLAP cells")->capture_default_str();
  table->add_option("--weighting", opt.table_weighting, "weighted or unweighted")->capture_default_str();
  table->add_option("--degree", opt.degree, "polynomial degree")->capture_default_str();
  add_common(table, opt);

  auto* validate = app.add_subcommand("validate", "dataset summary");
  validate->add_option("data", opt.inputs, "dataset CSVs")->required();
  add_common(validate, opt);

  std::vector<const char*> argv = {kToolName.data()};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Session session(opt, command, args, out, err);
    return session.execute();
  } catch (const ParameterError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << '\n';
    return kFitFailure;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace piotrowski::cli
