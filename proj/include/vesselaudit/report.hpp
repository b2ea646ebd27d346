#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vesselaudit/metrics.hpp"
#include "vesselaudit/resample.hpp"

namespace vaudit {

// Minimal CSV table: first record is the header. Handles quoted fields
// with doubled-quote escapes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws when missing.
  [[nodiscard]] std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

struct ReportTable {
  std::vector<SummaryRow> rows;
  std::string config_hash;
  std::string tool_version;
  std::string timestamp;
};

// Fixed schema, 4-decimal floats, absent metrics as empty cells. The
// returned text is byte-deterministic for identical rows.
std::string report_csv_text(const ReportTable& report);
void write_report_csv(const ReportTable& report, const std::filesystem::path& path);

// Full-precision values plus the provenance block.
std::string report_json_text(const ReportTable& report);
void write_report_json(const ReportTable& report, const std::filesystem::path& path);

// Inverse of report_csv_text for the fixed schema; empty cells become
// absent metrics. Provenance fields are left empty.
ReportTable report_table_from_csv(const std::filesystem::path& path);

struct DecimationSummaryRow {
  std::string dataset;
  std::string condition;
  Size2D processed;
  StratumRetention mean_retention;  // averaged across images; lost summed
};

std::string decimation_csv_text(const std::vector<DecimationSummaryRow>& rows);

// Best/worst thin sensitivity across conditions of one dataset.
struct ThinGap {
  double best = 0.0;
  double worst = 0.0;
  [[nodiscard]] double gap() const { return best - worst; }
};

// Keyed by dataset; datasets with no thin values are omitted.
std::map<std::string, ThinGap> thin_gaps(const ReportTable& report);

// Writes fig1_dice_vs_thin.csv, fig2_width_vs_thin.csv and
// fig4_thin_gap.csv under `dir`; rows lacking a thin value are skipped.
void emit_plotdata(const ReportTable& report, const std::filesystem::path& dir);

// FNV-1a over the canonical config description; stable across runs.
std::string fnv1a_hex(const std::string& text);

}  // namespace vaudit
