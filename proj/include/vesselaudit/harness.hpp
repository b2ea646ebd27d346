#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vesselaudit/manifest.hpp"
#include "vesselaudit/report.hpp"
#include "vesselaudit/stats.hpp"
#include "vesselaudit/stratify.hpp"

namespace vaudit {

struct RunConfig {
  std::vector<std::filesystem::path> manifests;
  // Preset name ("paper-table2") or path to a conditions JSON file.
  std::string conditions = "paper-table2";
  double threshold = 0.5;
  StratumThresholds thresholds;
  std::filesystem::path out_dir = ".";
  // Prediction tree root; defaults to each manifest's directory.
  std::optional<std::filesystem::path> pred_root;
  bool use_fov = false;
  // Resize probabilities bilinearly to native before thresholding instead
  // of thresholding first.
  bool soft_resize = false;
  int workers = 0;  // 0 = hardware concurrency
};

std::vector<ConditionSpec> resolve_conditions(const std::string& conditions,
                                              const std::string& dataset);

// Evaluates every (image, condition) pair of every manifest and reduces to
// one SummaryRow per (dataset, condition), ordered by that pair. Missing
// prediction files are reported to stderr and mark the row incomplete.
ReportTable run_evaluate(const RunConfig& config);

// Ground-truth-only sweep: per dataset and condition, decimation_audit per
// image, retention fractions averaged across images.
std::vector<DecimationSummaryRow> run_decimation_audit(const RunConfig& config);

enum class TestKind {
  wilcoxon,
  spearman,
  spearman_exact,
};

struct StatsQuery {
  std::filesystem::path csv;
  std::string column_a;
  std::string column_b;
  TestKind kind = TestKind::spearman;
  // Keep only rows where column == value, applied before the test.
  std::vector<std::pair<std::string, std::string>> where;
};

StatTestResult run_stats(const StatsQuery& query);

// Runs fn(0..n-1) on up to `workers` threads; the first exception wins and
// is rethrown after all threads join.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

// UTC ISO-8601; honours SOURCE_DATE_EPOCH for reproducible builds.
std::string current_timestamp();

std::string tool_version();

std::string config_hash(const RunConfig& config);

}  // namespace vaudit
