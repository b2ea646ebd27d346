#include "vesselaudit/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vaudit {
namespace {

constexpr const char* kReportHeader =
    "dataset,condition,width,dice_mean,dice_std,sens_mean,sens_std,spec_mean,"
    "spec_std,thin_mean,thin_std,medium_mean,medium_std,thick_mean,thick_std,"
    "incomplete";

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string cell(const std::optional<MetricStat>& s, bool std_part) {
  if (!s) return "";
  return fixed4(std_part ? s->stddev : s->mean);
}

std::string retention_cell(const std::optional<double>& v) {
  return v ? fixed4(*v) : "";
}

std::vector<SummaryRow> sorted_rows(const ReportTable& report) {
  std::vector<SummaryRow> rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.dataset, a.condition) < std::tie(b.dataset, b.condition);
  });
  return rows;
}

std::optional<double> parse_optional(const std::string& cell_text,
                                     const std::string& column) {
  if (cell_text.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(cell_text, &used);
    if (used != cell_text.size()) throw std::invalid_argument(cell_text);
    return v;
  } catch (const std::exception&) {
    throw Error("non-numeric cell '" + cell_text + "' in column " + column);
  }
}

std::optional<MetricStat> parse_stat(const std::vector<std::string>& row,
                                     const CsvTable& table, const std::string& prefix) {
  auto mean = parse_optional(row[table.column(prefix + "_mean")], prefix + "_mean");
  if (!mean) return std::nullopt;
  auto sd = parse_optional(row[table.column(prefix + "_std")], prefix + "_std");
  return MetricStat{*mean, sd.value_or(0.0)};
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error("CSV has no column named '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any_field = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    any_field = true;
  };
  auto end_record = [&] {
    if (any_field || !record.empty()) {
      end_field();
      records.push_back(std::move(record));
      record.clear();
      any_field = false;
      field.clear();
    }
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
      any_field = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\n') {
      if (!field.empty() || any_field || !record.empty()) end_record();
    } else if (ch != '\r') {
      field += ch;
      any_field = true;
    }
  }
  if (!field.empty() || !record.empty()) end_record();

  if (records.empty()) throw Error("CSV is empty");
  CsvTable table;
  table.header = records.front();
  table.rows.assign(records.begin() + 1, records.end());
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw Error("CSV row has " + std::to_string(row.size()) + " cells, expected " +
                  std::to_string(table.header.size()));
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string report_csv_text(const ReportTable& report) {
  std::ostringstream out;
  out << kReportHeader << "\n";
  for (const SummaryRow& r : sorted_rows(report)) {
    out << r.dataset << "," << r.condition << "," << r.processed_width << ","
        << cell(r.dice, false) << "," << cell(r.dice, true) << ","
        << cell(r.sens, false) << "," << cell(r.sens, true) << ","
        << cell(r.spec, false) << "," << cell(r.spec, true) << ","
        << cell(r.thin, false) << "," << cell(r.thin, true) << ","
        << cell(r.medium, false) << "," << cell(r.medium, true) << ","
        << cell(r.thick, false) << "," << cell(r.thick, true) << ","
        << (r.incomplete ? 1 : 0) << "\n";
  }
  return out.str();
}

void write_report_csv(const ReportTable& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string());
  out << report_csv_text(report);
  if (!out) throw Error("write failed: " + path.string());
}

std::string report_json_text(const ReportTable& report) {
  nlohmann::ordered_json root;
  root["provenance"] = {{"config_hash", report.config_hash},
                        {"tool_version", report.tool_version},
                        {"timestamp", report.timestamp}};
  root["rows"] = nlohmann::ordered_json::array();
  auto stat = [](const std::optional<MetricStat>& s) -> nlohmann::ordered_json {
    if (!s) return nullptr;
    return {{"mean", s->mean}, {"std", s->stddev}};
  };
  for (const SummaryRow& r : sorted_rows(report)) {
    root["rows"].push_back({{"dataset", r.dataset},
                            {"condition", r.condition},
                            {"width", r.processed_width},
                            {"dice", stat(r.dice)},
                            {"sensitivity", stat(r.sens)},
                            {"specificity", stat(r.spec)},
                            {"thin", stat(r.thin)},
                            {"medium", stat(r.medium)},
                            {"thick", stat(r.thick)},
                            {"incomplete", r.incomplete}});
  }
  return root.dump(2) + "\n";
}

void write_report_json(const ReportTable& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string());
  out << report_json_text(report);
  if (!out) throw Error("write failed: " + path.string());
}

ReportTable report_table_from_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv(path);
  ReportTable report;
  for (const auto& row : table.rows) {
    SummaryRow r;
    r.dataset = row[table.column("dataset")];
    r.condition = row[table.column("condition")];
    auto width = parse_optional(row[table.column("width")], "width");
    r.processed_width = width ? static_cast<int>(*width) : 0;
    r.dice = parse_stat(row, table, "dice");
    r.sens = parse_stat(row, table, "sens");
    r.spec = parse_stat(row, table, "spec");
    r.thin = parse_stat(row, table, "thin");
    r.medium = parse_stat(row, table, "medium");
    r.thick = parse_stat(row, table, "thick");
    const std::string& inc = row[table.column("incomplete")];
    r.incomplete = inc == "1" || inc == "true";
    report.rows.push_back(std::move(r));
  }
  return report;
}

std::string decimation_csv_text(const std::vector<DecimationSummaryRow>& rows) {
  std::ostringstream out;
  out << "dataset,condition,width,height,thin_retention,medium_retention,"
         "thick_retention,overall_retention,thin_lost,medium_lost,thick_lost\n";
  for (const auto& r : rows) {
    out << r.dataset << "," << r.condition << "," << r.processed.width << ","
        << r.processed.height << "," << retention_cell(r.mean_retention.thin) << ","
        << retention_cell(r.mean_retention.medium) << ","
        << retention_cell(r.mean_retention.thick) << ","
        << retention_cell(r.mean_retention.overall) << "," << r.mean_retention.lost.thin
        << "," << r.mean_retention.lost.medium << "," << r.mean_retention.lost.thick
        << "\n";
  }
  return out.str();
}

std::map<std::string, ThinGap> thin_gaps(const ReportTable& report) {
  std::map<std::string, ThinGap> gaps;
  std::map<std::string, bool> seen;
  for (const SummaryRow& r : report.rows) {
    if (!r.thin) continue;
    double v = r.thin->mean;
    auto [it, inserted] = gaps.try_emplace(r.dataset, ThinGap{v, v});
    if (!inserted) {
      it->second.best = std::max(it->second.best, v);
      it->second.worst = std::min(it->second.worst, v);
    }
  }
  return gaps;
}

void emit_plotdata(const ReportTable& report, const std::filesystem::path& dir) {
  if (report.rows.empty()) throw Error("plot data requires a non-empty report");
  std::filesystem::create_directories(dir);

  std::ofstream fig1(dir / "fig1_dice_vs_thin.csv", std::ios::binary);
  std::ofstream fig2(dir / "fig2_width_vs_thin.csv", std::ios::binary);
  std::ofstream fig4(dir / "fig4_thin_gap.csv", std::ios::binary);
  if (!fig1 || !fig2 || !fig4) throw Error("cannot open plot data files");

  fig1 << "dataset,condition,dice_mean,thin_mean\n";
  fig2 << "dataset,condition,width,thin_mean\n";
  for (const SummaryRow& r : sorted_rows(report)) {
    if (r.dice && r.thin) {
      fig1 << r.dataset << "," << r.condition << "," << fixed4(r.dice->mean) << ","
           << fixed4(r.thin->mean) << "\n";
    }
    if (r.thin) {
      fig2 << r.dataset << "," << r.condition << "," << r.processed_width << ","
           << fixed4(r.thin->mean) << "\n";
    }
  }

  fig4 << "dataset,best_thin,worst_thin,gap\n";
  for (const auto& [dataset, gap] : thin_gaps(report)) {
    fig4 << dataset << "," << fixed4(gap.best) << "," << fixed4(gap.worst) << ","
         << fixed4(gap.gap()) << "\n";
  }
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace vaudit
