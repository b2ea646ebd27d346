#include "vesselaudit/harness.hpp"

#include <atomic>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vesselaudit/edt.hpp"
#include "vesselaudit/image_io.hpp"
#include "vesselaudit/metrics.hpp"

namespace vaudit {
namespace {

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct LoadedImage {
  const ManifestEntry* entry = nullptr;
  BinaryMask gt;
  std::optional<BinaryMask> fov;
  StratumLabels labels;
};

std::vector<LoadedImage> load_dataset(const DatasetManifest& manifest,
                                      const RunConfig& config) {
  std::vector<LoadedImage> images(manifest.entries.size());
  parallel_for(manifest.entries.size(), config.workers, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    LoadedImage img;
    img.entry = &entry;
    img.gt = load_mask(entry.gt);
    if (img.gt.size() != manifest.native_size) {
      throw Error("ground truth for " + entry.id + " is " + img.gt.size().str() +
                  ", manifest says " + manifest.native_size.str());
    }
    if (config.use_fov && entry.fov) {
      img.fov = load_mask(*entry.fov);
      if (img.fov->size() != manifest.native_size) {
        throw Error("FOV mask for " + entry.id + " is " + img.fov->size().str() +
                    ", manifest says " + manifest.native_size.str());
      }
    }
    DistanceMap dmap = euclidean_distance_transform(img.gt);
    img.labels = stratify(dmap, img.gt, config.thresholds);
    images[i] = std::move(img);
  });
  return images;
}

std::optional<std::filesystem::path> prediction_path(
    const ManifestEntry& entry, const std::filesystem::path& root,
    const std::string& condition) {
  if (entry.pred) {
    return std::filesystem::exists(*entry.pred) ? entry.pred : std::nullopt;
  }
  for (const char* ext : {".png", ".pgm"}) {
    std::filesystem::path p = root / condition / (entry.id + ext);
    if (std::filesystem::exists(p)) return p;
  }
  return std::nullopt;
}

// Loads a prediction as probabilities when the file is grayscale, falling
// back to a plain mask read (RGB mask exports).
BinaryMask load_prediction(const std::filesystem::path& path, Size2D native,
                           Size2D processed, const RunConfig& config) {
  ProbabilityMap prob;
  bool have_prob = true;
  try {
    prob = load_probability_map(path);
  } catch (const Error&) {
    have_prob = false;
  }

  Size2D actual = have_prob ? prob.size() : load_mask(path).size();
  if (actual != processed && actual != native) {
    throw Error("prediction " + path.string() + " is " + actual.str() +
                ", expected " + processed.str() + " or " + native.str());
  }

  if (!have_prob) return load_mask(path);
  if (config.soft_resize && prob.size() != native) {
    prob = resize_bilinear(prob, native);
  }
  return binarize(prob, config.threshold);
}

}  // namespace

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t count = workers > 0 ? static_cast<std::size_t>(workers) : hw;
  count = std::min(count, n);

  if (count <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string current_timestamp() {
  std::time_t now;
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  } else {
    now = std::time(nullptr);
  }
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string tool_version() {
#ifdef VAUDIT_VERSION
  return VAUDIT_VERSION;
#else
  return "unknown";
#endif
}

std::string config_hash(const RunConfig& config) {
  std::ostringstream canon;
  char num[64];
  std::snprintf(num, sizeof num, "%.17g", config.threshold);
  canon << "conditions=" << config.conditions << ";threshold=" << num;
  std::snprintf(num, sizeof num, "%.17g,%.17g", config.thresholds.thin_below,
                config.thresholds.thick_above);
  canon << ";strata=" << num << ";fov=" << (config.use_fov ? 1 : 0)
        << ";soft=" << (config.soft_resize ? 1 : 0)
        << ";version=" << tool_version();
  for (const auto& m : config.manifests) {
    canon << ";manifest=" << m.filename().string() << ":" << fnv1a_hex(file_bytes(m));
  }
  return fnv1a_hex(canon.str());
}

std::vector<ConditionSpec> resolve_conditions(const std::string& conditions,
                                              const std::string& dataset) {
  if (conditions == "paper-table2") return table_conditions(dataset);
  return load_conditions(conditions);
}

ReportTable run_evaluate(const RunConfig& config) {
  if (config.manifests.empty()) throw Error("no manifest given");
  config.thresholds.validate();
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
    throw Error("threshold must lie in [0, 1]");
  }

  ReportTable report;
  for (const auto& manifest_path : config.manifests) {
    DatasetManifest manifest = load_manifest(manifest_path);
    std::filesystem::path root =
        config.pred_root ? *config.pred_root : manifest_path.parent_path();
    const auto conditions = resolve_conditions(config.conditions, manifest.dataset);
    const auto sizes = condition_sizes(manifest.native_size, conditions);
    const std::vector<LoadedImage> images = load_dataset(manifest, config);

    for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
      const std::string& cond_name = sizes[ci].first;
      const Size2D processed = sizes[ci].second;

      std::vector<std::optional<EvalResult>> slots(images.size());
      parallel_for(images.size(), config.workers, [&](std::size_t i) {
        const LoadedImage& img = images[i];
        auto pred_path = prediction_path(*img.entry, root, cond_name);
        if (!pred_path) return;
        BinaryMask pred =
            load_prediction(*pred_path, manifest.native_size, processed, config);
        const BinaryMask* fov = img.fov ? &*img.fov : nullptr;
        slots[i] = evaluate_image(pred, img.gt, img.labels, fov, img.entry->id);
      });

      std::vector<EvalResult> results;
      std::unordered_map<std::string, int> fold_of;
      bool any_missing = false;
      for (std::size_t i = 0; i < images.size(); ++i) {
        if (!slots[i]) {
          any_missing = true;
          std::cerr << "warning: no prediction for " << manifest.dataset << "/"
                    << cond_name << "/" << images[i].entry->id << "\n";
          continue;
        }
        results.push_back(*slots[i]);
        fold_of[images[i].entry->id] = images[i].entry->fold;
      }

      SummaryRow row;
      if (!results.empty()) row = aggregate(results, fold_of);
      row.dataset = manifest.dataset;
      row.condition = cond_name;
      row.processed_width = processed.width;
      row.incomplete = row.incomplete || any_missing;
      report.rows.push_back(std::move(row));
    }
  }

  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const SummaryRow& a, const SummaryRow& b) {
                     return std::tie(a.dataset, a.condition) <
                            std::tie(b.dataset, b.condition);
                   });
  report.config_hash = config_hash(config);
  report.tool_version = tool_version();
  report.timestamp = current_timestamp();
  return report;
}

std::vector<DecimationSummaryRow> run_decimation_audit(const RunConfig& config) {
  if (config.manifests.empty()) throw Error("no manifest given");
  config.thresholds.validate();

  std::vector<DecimationSummaryRow> rows;
  for (const auto& manifest_path : config.manifests) {
    DatasetManifest manifest = load_manifest(manifest_path);
    const auto conditions = resolve_conditions(config.conditions, manifest.dataset);
    const auto sizes = condition_sizes(manifest.native_size, conditions);
    const std::vector<LoadedImage> images = load_dataset(manifest, config);

    std::vector<std::vector<DecimationRow>> audits(images.size());
    parallel_for(images.size(), config.workers, [&](std::size_t i) {
      audits[i] = decimation_audit(images[i].gt, images[i].labels, conditions);
    });

    for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
      DecimationSummaryRow row;
      row.dataset = manifest.dataset;
      row.condition = sizes[ci].first;
      row.processed = sizes[ci].second;

      double sums[4] = {};
      int counts[4] = {};
      for (const auto& audit : audits) {
        const StratumRetention& ret = audit[ci].retention;
        const std::optional<double> vals[4] = {ret.thin, ret.medium, ret.thick,
                                               ret.overall};
        for (int k = 0; k < 4; ++k) {
          if (vals[k]) {
            sums[k] += *vals[k];
            ++counts[k];
          }
        }
        row.mean_retention.lost.thin += ret.lost.thin;
        row.mean_retention.lost.medium += ret.lost.medium;
        row.mean_retention.lost.thick += ret.lost.thick;
      }
      auto mean = [&](int k) -> std::optional<double> {
        if (counts[k] == 0) return std::nullopt;
        return sums[k] / counts[k];
      };
      row.mean_retention.thin = mean(0);
      row.mean_retention.medium = mean(1);
      row.mean_retention.thick = mean(2);
      row.mean_retention.overall = mean(3);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

StatTestResult run_stats(const StatsQuery& query) {
  CsvTable table = read_csv(query.csv);

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    bool ok = true;
    for (const auto& [col, value] : query.where) {
      if (table.rows[i][table.column(col)] != value) {
        ok = false;
        break;
      }
    }
    if (ok) keep.push_back(i);
  }

  auto extract = [&](const std::string& name) {
    std::vector<double> out;
    const std::size_t col = table.column(name);
    out.reserve(keep.size());
    for (std::size_t i : keep) {
      const std::string& cell = table.rows[i][col];
      try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        out.push_back(v);
      } catch (const std::exception&) {
        throw Error("non-numeric cell '" + cell + "' in column " + name);
      }
    }
    return out;
  };

  const std::vector<double> a = extract(query.column_a);
  const std::vector<double> b = extract(query.column_b);
  switch (query.kind) {
    case TestKind::wilcoxon:
      return wilcoxon_signed_rank(a, b);
    case TestKind::spearman:
      return spearman(a, b);
    case TestKind::spearman_exact:
      return spearman_exact(a, b);
  }
  throw Error("unknown test kind");
}

}  // namespace vaudit
