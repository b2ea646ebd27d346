#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "vesselaudit/harness.hpp"
#include "vesselaudit/image_io.hpp"
#include "vesselaudit/metrics.hpp"
#include "vesselaudit/resample.hpp"

using namespace vaudit;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  fs::path dir;
  fs::path manifest;
  fs::path conditions;
  fs::path pred_root;
  BinaryMask gt_a;
  BinaryMask gt_b;
};

BinaryMask block_mask(int row0, int row1, int col0, int col1) {
  Plane<std::uint8_t> m = Plane<std::uint8_t>::Zero(16, 16);
  for (int r = row0; r <= row1; ++r)
    for (int c = col0; c <= col1; ++c) m(r, c) = 1;
  return BinaryMask(std::move(m));
}

Fixture make_dataset(const std::string& tag, bool inline_preds = false) {
  Fixture f;
  f.dir = fs::temp_directory_path() / ("vaudit_harness_" + tag);
  fs::remove_all(f.dir);
  fs::create_directories(f.dir / "gt");

  f.gt_a = block_mask(4, 6, 2, 13);   // 3-wide band
  f.gt_b = block_mask(8, 13, 8, 13);  // 6x6 block
  save_mask(f.gt_a, f.dir / "gt/a.png");
  save_mask(f.gt_b, f.dir / "gt/b.png");

  f.manifest = f.dir / "manifest.json";
  {
    std::ofstream out(f.manifest);
    out << R"({"dataset": "mini", "native_size": {"width": 16, "height": 16}, "entries": [)";
    if (inline_preds) {
      out << R"({"id": "a", "gt": "gt/a.png", "pred": "gt/a.png", "fold": 0},)"
          << R"({"id": "b", "gt": "gt/b.png", "pred": "gt/b.png", "fold": 1}]})";
    } else {
      out << R"({"id": "a", "gt": "gt/a.png", "fold": 0},)"
          << R"({"id": "b", "gt": "gt/b.png", "fold": 1}]})";
    }
  }

  f.conditions = f.dir / "conditions.json";
  {
    std::ofstream out(f.conditions);
    out << R"([{"name": "full", "scale": 1.0}, {"name": "half", "scale": 0.5}])";
  }

  f.pred_root = f.dir / "pred";
  fs::create_directories(f.pred_root / "full");
  fs::create_directories(f.pred_root / "half");
  save_mask(f.gt_a, f.pred_root / "full/a.png");
  save_mask(f.gt_b, f.pred_root / "full/b.png");
  save_mask(resize_nearest(f.gt_a, {8, 8}), f.pred_root / "half/a.png");
  save_mask(resize_nearest(f.gt_b, {8, 8}), f.pred_root / "half/b.png");
  return f;
}

RunConfig config_for(const Fixture& f) {
  RunConfig cfg;
  cfg.manifests = {f.manifest};
  cfg.conditions = f.conditions.string();
  cfg.pred_root = f.pred_root;
  cfg.workers = 2;
  return cfg;
}

}  // namespace

TEST_CASE("evaluate scores every condition of every image") {
  const auto f = make_dataset("basic");
  const auto report = run_evaluate(config_for(f));
  REQUIRE(report.rows.size() == 2);

  const auto& full = report.rows[0];
  CHECK(full.dataset == "mini");
  CHECK(full.condition == "full");
  CHECK(full.processed_width == 16);
  CHECK(full.dice->mean == 1.0);
  CHECK(full.dice->stddev == 0.0);
  CHECK(full.sens->mean == 1.0);
  CHECK(full.spec->mean == 1.0);
  CHECK_FALSE(full.incomplete);

  // the half-resolution row matches scoring the round-trip masks directly
  const auto& half = report.rows[1];
  CHECK(half.condition == "half");
  CHECK(half.processed_width == 8);
  const auto score = [](const BinaryMask& gt) {
    const auto pred = resize_nearest(resize_nearest(gt, {8, 8}), {16, 16});
    return evaluate_image(pred, gt, StratumThresholds{}, nullptr, "x");
  };
  const double expect_mean =
      (score( BinaryMask(f.gt_a)).dice_score + score(BinaryMask(f.gt_b)).dice_score) / 2.0;
  CHECK(half.dice->mean == doctest::Approx(expect_mean).epsilon(1e-15));
  CHECK_FALSE(half.incomplete);

  CHECK_FALSE(report.config_hash.empty());
  CHECK(report.tool_version == tool_version());
}

TEST_CASE("evaluate output is byte-stable across runs and worker counts") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  const auto f = make_dataset("stable");
  auto cfg = config_for(f);
  cfg.workers = 1;
  const auto first = run_evaluate(cfg);
  cfg.workers = 4;
  const auto second = run_evaluate(cfg);
  CHECK(report_csv_text(first) == report_csv_text(second));
  CHECK(report_json_text(first) == report_json_text(second));
  CHECK(first.config_hash == second.config_hash);
  CHECK(first.timestamp == "1970-01-01T00:00:00Z");
}

TEST_CASE("missing predictions mark the row incomplete") {
  const auto f = make_dataset("missing");
  fs::remove(f.pred_root / "half/b.png");
  const auto report = run_evaluate(config_for(f));
  REQUIRE(report.rows.size() == 2);
  CHECK_FALSE(report.rows[0].incomplete);
  CHECK(report.rows[1].incomplete);
  // the surviving image still scores
  REQUIRE(report.rows[1].dice.has_value());
}

TEST_CASE("per-entry prediction paths override the tree convention") {
  const auto f = make_dataset("inline", /*inline_preds=*/true);
  auto cfg = config_for(f);
  cfg.pred_root = f.dir / "nowhere";  // conventional tree absent on purpose
  const auto report = run_evaluate(cfg);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].dice->mean == 1.0);
  CHECK(report.rows[1].dice->mean == 1.0);  // native-size override passes through
  CHECK_FALSE(report.rows[1].incomplete);
}

TEST_CASE("ground truth must match the declared native size") {
  auto f = make_dataset("badgt");
  save_mask(BinaryMask::zeros({8, 8}), f.dir / "gt/a.png");
  CHECK_THROWS_AS(run_evaluate(config_for(f)), Error);
}

TEST_CASE("predictions must arrive at the processed or native size") {
  const auto f = make_dataset("badpred");
  save_mask(BinaryMask::zeros({5, 5}), f.pred_root / "half/a.png");
  CHECK_THROWS_AS(run_evaluate(config_for(f)), Error);
}

TEST_CASE("soft and hard handling agree for native-size predictions") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  const auto f = make_dataset("soft");
  // native-size predictions everywhere
  save_mask(f.gt_a, f.pred_root / "half/a.png");
  save_mask(f.gt_b, f.pred_root / "half/b.png");
  auto cfg = config_for(f);
  const auto hard = run_evaluate(cfg);
  cfg.soft_resize = true;
  const auto soft = run_evaluate(cfg);
  CHECK(report_csv_text(hard) == report_csv_text(soft));
}

TEST_CASE("config hash tracks inputs that change results") {
  const auto f = make_dataset("hash");
  const auto cfg = config_for(f);
  const auto base = config_hash(cfg);
  CHECK(base == config_hash(cfg));

  auto shifted = cfg;
  shifted.threshold = 0.25;
  CHECK(config_hash(shifted) != base);

  auto restrata = cfg;
  restrata.thresholds = StratumThresholds{2.0, 5.0};
  CHECK(config_hash(restrata) != base);

  auto elsewhere = cfg;
  elsewhere.out_dir = "/somewhere/else";
  CHECK(config_hash(elsewhere) == base);  // output location is not an input

  // manifest content feeds the hash
  {
    std::ofstream out(f.manifest, std::ios::app);
    out << "\n";
  }
  CHECK(config_hash(cfg) != base);
}

TEST_CASE("condition resolution") {
  const auto ladder = resolve_conditions("paper-table2", "DRIVE");
  REQUIRE(ladder.size() == 5);
  CHECK(ladder[4].name == "R5");
  CHECK(resolve_conditions("paper-table2", "mini").size() == 4);

  const auto f = make_dataset("conds");
  const auto custom = resolve_conditions(f.conditions.string(), "mini");
  REQUIRE(custom.size() == 2);
  CHECK(custom[0].name == "full");

  CHECK_THROWS_AS(resolve_conditions("/no/such/file.json", "mini"), Error);
}

TEST_CASE("decimation sweep averages per-image retention") {
  const auto f = make_dataset("decim");
  auto cfg = config_for(f);
  const auto rows = run_decimation_audit(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].dataset == "mini");
  CHECK(rows[0].condition == "full");
  REQUIRE(rows[0].mean_retention.overall.has_value());
  CHECK(*rows[0].mean_retention.overall == 1.0);
  CHECK(rows[0].mean_retention.lost.total() == 0);
  CHECK(*rows[1].mean_retention.overall <= 1.0);

  const auto text = decimation_csv_text(rows);
  CHECK(text.starts_with(
      "dataset,condition,width,height,thin_retention,medium_retention,thick_retention,"
      "overall_retention,thin_lost,medium_lost,thick_lost\n"));
  CHECK(text.find("mini,full,16,16,") != std::string::npos);
}

TEST_CASE("stats queries run against report columns") {
  const fs::path table = fs::path(TEST_DATA_DIR) / "results_fixture.csv";

  StatsQuery q;
  q.csv = table;
  q.column_a = "dice_mean";
  q.column_b = "thin_mean";
  q.kind = TestKind::spearman;
  q.where = {{"dataset", "HRF"}};
  const auto rho = run_stats(q);
  CHECK(rho.statistic == -0.9);
  CHECK(std::abs(rho.p_value - 0.0373860735) < 1e-8);
  CHECK(rho.n == 5);

  q.kind = TestKind::spearman_exact;
  const auto exact = run_stats(q);
  CHECK(exact.statistic == -0.9);
  CHECK(exact.p_value == doctest::Approx(10.0 / 120.0).epsilon(1e-12));

  q.kind = TestKind::wilcoxon;
  q.where = {{"dataset", "DRIVE"}};
  const auto w = run_stats(q);
  CHECK(w.statistic == 15.0);  // dice above thin in all five rows
  CHECK(w.p_value == 0.0625);

  q.where = {{"dataset", "DRIVE"}, {"condition", "R1"}};
  const auto solo = run_stats(q);  // one surviving pair still enumerates
  CHECK(solo.n == 1);
  CHECK(solo.p_value == 1.0);

  q.kind = TestKind::spearman;
  CHECK_THROWS_AS(run_stats(q), Error);  // one row cannot be correlated

  q.where = {{"no_such_column", "x"}};
  CHECK_THROWS_AS(run_stats(q), Error);

  q.where.clear();
  q.column_a = "dataset";  // not numeric
  CHECK_THROWS_AS(run_stats(q), Error);
}

TEST_CASE("csv parser handles quoting") {
  const auto table = parse_csv("h1,h2,h3\r\na,\"b,c\",\"say \"\"hi\"\"\"\n\"\",y,z\n");
  REQUIRE(table.header.size() == 3);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0][1] == "b,c");
  CHECK(table.rows[0][2] == "say \"hi\"");
  CHECK(table.rows[1][0].empty());
  CHECK(table.column("h3") == 2);
  CHECK_THROWS_AS(static_cast<void>(table.column("h4")), Error);
}

TEST_CASE("report serialization round trips through csv") {
  ReportTable report;
  SummaryRow a;
  a.dataset = "mini";
  a.condition = "R1";
  a.processed_width = 16;
  a.dice = MetricStat{0.87654321, 0.01234567};
  a.thin = MetricStat{0.5, 0.25};
  SummaryRow b;
  b.dataset = "mini";
  b.condition = "R2";
  b.processed_width = 12;
  b.incomplete = true;  // metrics all absent
  report.rows = {a, b};

  const auto dir = fs::temp_directory_path() / "vaudit_harness_report";
  fs::create_directories(dir);
  write_report_csv(report, dir / "report.csv");
  const auto back = report_table_from_csv(dir / "report.csv");
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].dice->mean == 0.8765);  // four decimals survive
  CHECK(back.rows[0].dice->stddev == 0.0123);
  CHECK_FALSE(back.rows[0].spec.has_value());
  CHECK_FALSE(back.rows[1].dice.has_value());
  CHECK(back.rows[1].incomplete);

  // a second pass through the serializer is a fixed point
  const auto text = report_csv_text(back);
  write_report_csv(back, dir / "report2.csv");
  CHECK(report_csv_text(report_table_from_csv(dir / "report2.csv")) == text);
}

TEST_CASE("report json carries provenance and full precision") {
  ReportTable report;
  SummaryRow a;
  a.dataset = "mini";
  a.condition = "R1";
  a.processed_width = 16;
  a.dice = MetricStat{1.0 / 3.0, 0.0};
  report.rows = {a};
  report.config_hash = "cafef00dcafef00d";
  report.tool_version = "0.1.0";
  report.timestamp = "1970-01-01T00:00:00Z";

  const auto text = report_json_text(report);
  CHECK(text.find("cafef00dcafef00d") != std::string::npos);
  CHECK(text.find("0.3333333333333333") != std::string::npos);
  CHECK(text.find("\"sensitivity\": null") != std::string::npos);
}

TEST_CASE("thin gaps and plot data from a report") {
  const auto report = report_table_from_csv(fs::path(TEST_DATA_DIR) / "results_fixture.csv");
  REQUIRE(report.rows.size() == 25);

  const auto gaps = thin_gaps(report);
  REQUIRE(gaps.size() == 5);
  CHECK(gaps.at("DRIVE").best == doctest::Approx(0.6723).epsilon(1e-12));
  CHECK(gaps.at("DRIVE").worst == doctest::Approx(0.5139).epsilon(1e-12));
  CHECK(gaps.at("DRIVE").gap() == doctest::Approx(0.1584).epsilon(1e-9));

  const auto dir = fs::temp_directory_path() / "vaudit_harness_plots";
  fs::remove_all(dir);
  fs::create_directories(dir);
  emit_plotdata(report, dir);

  const auto lines_of = [](const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    int n = 0;
    while (std::getline(in, line))
      if (!line.empty()) ++n;
    return n;
  };
  CHECK(lines_of(dir / "fig1_dice_vs_thin.csv") == 26);
  CHECK(lines_of(dir / "fig2_width_vs_thin.csv") == 26);
  CHECK(lines_of(dir / "fig4_thin_gap.csv") == 6);
}

TEST_CASE("parallel dispatch covers every index once") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(257, 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);

  std::atomic<long> sum{0};
  parallel_for(100, 1, [&](std::size_t i) { sum += static_cast<long>(i); });
  CHECK(sum.load() == 4950);

  parallel_for(0, 8, [&](std::size_t) { FAIL("no work expected"); });

  CHECK_THROWS_WITH_AS(
      parallel_for(64, 4,
                   [](std::size_t i) {
                     if (i == 37) throw Error("worker failure");
                   }),
      "worker failure", Error);
}

TEST_CASE("timestamps honour the reproducible-build override") {
  setenv("SOURCE_DATE_EPOCH", "946684800", 1);
  CHECK(current_timestamp() == "2000-01-01T00:00:00Z");
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(current_timestamp() == "1970-01-01T00:00:00Z");
  CHECK_FALSE(tool_version().empty());
}
