#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "vesselaudit/harness.hpp"
#include "vesselaudit/image_io.hpp"
#include "vesselaudit/phantom.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vaudit;

StratumThresholds parse_strata(const std::string& text) {
  StratumThresholds t;
  if (std::sscanf(text.c_str(), "%lf,%lf", &t.thin_below, &t.thick_above) != 2) {
    throw Error("--strata expects two comma-separated values, e.g. 3,7");
  }
  t.validate();
  return t;
}

int cmd_evaluate(const RunConfig& config, const std::string& format, bool plotdata) {
  ReportTable report = run_evaluate(config);
  fs::create_directories(config.out_dir);
  fs::path out = config.out_dir / (format == "json" ? "report.json" : "report.csv");
  if (format == "json") {
    write_report_json(report, out);
  } else {
    write_report_csv(report, out);
  }
  if (plotdata) emit_plotdata(report, config.out_dir);
  std::cout << "wrote " << out.string() << " (" << report.rows.size() << " rows)\n";

  for (const SummaryRow& row : report.rows) {
    if (row.incomplete) return 2;
  }
  return 0;
}

int cmd_decimate(const RunConfig& config, bool have_out) {
  auto rows = run_decimation_audit(config);
  std::string csv = decimation_csv_text(rows);
  if (have_out) {
    fs::create_directories(config.out_dir);
    fs::path out = config.out_dir / "decimation.csv";
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot open " + out.string());
    f << csv;
    std::cout << "wrote " << out.string() << " (" << rows.size() << " rows)\n";
  } else {
    std::cout << csv;
  }
  return 0;
}

int cmd_stats(const StatsQuery& query) {
  StatTestResult res = run_stats(query);
  const char* method =
      res.method == PValueMethod::exact_enumeration ? "exact" : "t-approx";
  std::printf("statistic=%.6f p=%.6g method=%s n=%d%s\n", res.statistic, res.p_value,
              method, res.n, res.degenerate ? " degenerate" : "");
  return 0;
}

int cmd_phantom(const fs::path& out_dir, bool with_predictions) {
  fs::create_directories(out_dir);
  const std::vector<Phantom> suite = standard_suite();

  nlohmann::ordered_json expectations = nlohmann::ordered_json::array();
  nlohmann::ordered_json manifest;
  manifest["dataset"] = "phantoms";
  manifest["native_size"] = {{"width", 128}, {"height", 128}};
  manifest["entries"] = nlohmann::ordered_json::array();

  for (std::size_t i = 0; i < suite.size(); ++i) {
    const Phantom& ph = suite[i];
    save_mask(ph.mask, out_dir / (ph.name + ".png"));
    save_stratum_png(ph.labels, out_dir / (ph.name + "_strata.png"));

    StratumCounts counts = stratum_counts(ph.labels);
    nlohmann::ordered_json regions = nlohmann::ordered_json::array();
    for (const RegionExpectation& e : ph.expected) {
      regions.push_back({{"region", e.region}, {"halfwidth", e.nominal_peak_halfwidth}});
    }
    expectations.push_back({{"name", ph.name},
                            {"width", ph.mask.width()},
                            {"height", ph.mask.height()},
                            {"foreground", ph.mask.foreground_count()},
                            {"strata",
                             {{"thin", counts.thin},
                              {"medium", counts.medium},
                              {"thick", counts.thick}}},
                            {"regions", regions}});
    manifest["entries"].push_back(
        {{"id", ph.name}, {"gt", ph.name + ".png"}, {"fold", static_cast<int>(i % 2)}});
  }

  std::ofstream ex(out_dir / "expectations.json");
  ex << expectations.dump(2) << "\n";
  std::ofstream mf(out_dir / "manifest.json");
  mf << manifest.dump(2) << "\n";

  if (with_predictions) {
    for (const Phantom& ph : suite) {
      const auto sizes = condition_sizes(ph.mask.size(), table_conditions("phantoms"));
      for (const auto& [cond, processed] : sizes) {
        fs::path dir = out_dir / "pred" / cond;
        fs::create_directories(dir);
        BinaryMask down = resize_nearest(ph.mask, processed);
        BinaryMask up = resize_nearest(down, ph.mask.size());
        save_mask(up, dir / (ph.name + ".png"));
      }
    }
  }

  std::cout << "wrote " << suite.size() << " phantoms under " << out_dir.string()
            << "\n";
  return 0;
}

int cmd_sizes(const std::string& conditions, const std::string& dataset,
              std::optional<Size2D> native) {
  std::vector<std::pair<std::string, Size2D>> datasets;
  if (native) {
    datasets.emplace_back(dataset.empty() ? "custom" : dataset, *native);
  } else {
    datasets = known_dataset_sizes();
  }
  std::cout << "dataset,condition,width,height\n";
  for (const auto& [name, size] : datasets) {
    for (const auto& [cond, processed] :
         condition_sizes(size, resolve_conditions(conditions, name))) {
      std::cout << name << "," << cond << "," << processed.width << ","
                << processed.height << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Width-stratified evaluation of vessel segmentation masks"};
  app.require_subcommand(1);

  RunConfig config;
  std::string strata_text = "3,7";
  std::string format = "csv";
  std::string pred_root;
  bool plotdata = false;
  bool have_out = false;

  auto add_common = [&](CLI::App* cmd, bool needs_manifest) {
    if (needs_manifest) {
      cmd->add_option("--manifest", config.manifests, "dataset manifest JSON")
          ->required()
          ->check(CLI::ExistingFile);
    }
    cmd->add_option("--conditions", config.conditions,
                    "condition preset (paper-table2) or JSON file");
    cmd->add_option("--strata", strata_text, "stratum thresholds lo,hi (default 3,7)");
    cmd->add_option("--workers", config.workers, "worker thread count (0 = all cores)");
  };

  CLI::App* evaluate = app.add_subcommand("evaluate", "score predictions per condition");
  add_common(evaluate, true);
  evaluate->add_option("--threshold", config.threshold, "binarization threshold");
  auto* eval_out = evaluate->add_option("--out", config.out_dir, "output directory");
  evaluate->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  evaluate->add_option("--pred-root", pred_root,
                       "prediction tree root (default: manifest directory)");
  evaluate->add_flag("--fov", config.use_fov, "restrict specificity to FOV masks");
  evaluate->add_flag("--soft-resize", config.soft_resize,
                     "bilinear-resize probabilities before thresholding");
  evaluate->add_flag("--plotdata", plotdata, "emit figure series CSVs");

  CLI::App* decimate = app.add_subcommand("decimate", "ground-truth round-trip audit");
  add_common(decimate, true);
  auto* dec_out = decimate->add_option("--out", config.out_dir, "output directory");

  CLI::App* stats = app.add_subcommand("stats", "statistical test on a results CSV");
  StatsQuery query;
  std::string test_name = "spearman";
  std::vector<std::string> where;
  stats->add_option("--csv", query.csv, "results CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--col-a", query.column_a, "first column")->required();
  stats->add_option("--col-b", query.column_b, "second column")->required();
  stats->add_option("--test", test_name, "wilcoxon | spearman | spearman-exact")
      ->check(CLI::IsMember({"wilcoxon", "spearman", "spearman-exact"}));
  stats->add_option("--where", where, "filter rows, column=value");

  CLI::App* phantom = app.add_subcommand("phantom", "write the synthetic suite");
  fs::path phantom_out;
  bool with_predictions = false;
  phantom->add_option("--out", phantom_out, "output directory")->required();
  phantom->add_flag("--with-predictions", with_predictions,
                    "also write decimated round-trip predictions");

  CLI::App* sizes = app.add_subcommand("sizes", "print processed sizes per condition");
  std::string sizes_dataset;
  std::string native_text;
  sizes->add_option("--conditions", config.conditions,
                    "condition preset (paper-table2) or JSON file");
  sizes->add_option("--dataset", sizes_dataset, "dataset name for --native");
  sizes->add_option("--native", native_text, "native size WxH (default: known datasets)");

  CLI11_PARSE(app, argc, argv);

  try {
    config.thresholds = parse_strata(strata_text);
    if (!pred_root.empty()) config.pred_root = pred_root;

    if (*evaluate) {
      (void)eval_out;
      return cmd_evaluate(config, format, plotdata);
    }
    if (*decimate) {
      return cmd_decimate(config, !dec_out->empty());
    }
    if (*stats) {
      if (test_name == "wilcoxon") query.kind = TestKind::wilcoxon;
      else if (test_name == "spearman-exact") query.kind = TestKind::spearman_exact;
      else query.kind = TestKind::spearman;
      for (const std::string& w : where) {
        auto eq = w.find('=');
        if (eq == std::string::npos) throw Error("--where expects column=value");
        query.where.emplace_back(w.substr(0, eq), w.substr(eq + 1));
      }
      return cmd_stats(query);
    }
    if (*phantom) {
      return cmd_phantom(phantom_out, with_predictions);
    }
    if (*sizes) {
      std::optional<Size2D> native;
      if (!native_text.empty()) {
        Size2D s;
        if (std::sscanf(native_text.c_str(), "%dx%d", &s.width, &s.height) != 2) {
          throw Error("--native expects WxH, e.g. 565x584");
        }
        native = s;
      }
      return cmd_sizes(config.conditions, sizes_dataset, native);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
