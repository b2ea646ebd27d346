#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vesselaudit/raster.hpp"

namespace vaudit {

struct ManifestEntry {
  std::string id;
  std::filesystem::path gt;
  std::optional<std::filesystem::path> pred;
  std::optional<std::filesystem::path> fov;
  int fold = 0;
};

// Dataset description: one ground-truth raster per image, all at the same
// native size, partitioned into contiguous folds 0..F-1.
struct DatasetManifest {
  std::string dataset;
  Size2D native_size;
  std::vector<ManifestEntry> entries;

  [[nodiscard]] int fold_count() const;
};

// Parses and validates a manifest JSON file. Relative paths inside the file
// are resolved against the file's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Same, from an already-parsed JSON text; `base_dir` anchors relative paths.
DatasetManifest parse_manifest(const std::string& json_text,
                               const std::filesystem::path& base_dir);

}  // namespace vaudit
