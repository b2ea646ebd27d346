#include "vesselaudit/manifest.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace vaudit {
namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error("manifest missing field '" + std::string(key) + "' in " + where);
  }
  return *it;
}

}  // namespace

int DatasetManifest::fold_count() const {
  int max_fold = -1;
  for (const auto& e : entries) max_fold = std::max(max_fold, e.fold);
  return max_fold + 1;
}

DatasetManifest parse_manifest(const std::string& json_text,
                               const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error("manifest root must be an object");

  DatasetManifest m;
  m.dataset = require(root, "dataset", "root").get<std::string>();
  if (m.dataset.empty()) throw Error("manifest dataset name is empty");

  const json& ns = require(root, "native_size", "root");
  m.native_size.width = require(ns, "width", "native_size").get<int>();
  m.native_size.height = require(ns, "height", "native_size").get<int>();
  if (m.native_size.width < 1 || m.native_size.height < 1) {
    throw Error("manifest native_size must be positive");
  }

  const json& entries = require(root, "entries", "root");
  if (!entries.is_array() || entries.empty()) {
    throw Error("manifest entries must be a non-empty array");
  }

  std::set<std::string> seen_ids;
  std::set<int> folds;
  for (const json& je : entries) {
    ManifestEntry e;
    e.id = require(je, "id", "entry").get<std::string>();
    if (e.id.empty()) throw Error("manifest entry has empty id");
    if (!seen_ids.insert(e.id).second) {
      throw Error("duplicate image id in manifest: " + e.id);
    }
    e.gt = resolve(base_dir, require(je, "gt", e.id).get<std::string>());
    if (je.contains("pred")) e.pred = resolve(base_dir, je["pred"].get<std::string>());
    if (je.contains("fov")) e.fov = resolve(base_dir, je["fov"].get<std::string>());
    e.fold = require(je, "fold", e.id).get<int>();
    if (e.fold < 0) throw Error("negative fold id for image " + e.id);
    folds.insert(e.fold);
    m.entries.push_back(std::move(e));
  }

  int max_fold = *folds.rbegin();
  for (int f = 0; f <= max_fold; ++f) {
    if (!folds.count(f)) {
      throw Error("manifest folds are not contiguous: fold " + std::to_string(f) +
                  " is missing");
    }
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

}  // namespace vaudit
