#include "vesselaudit/resample.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace vaudit {
namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? (a + b - 1) / b : -(-a / b);
}

// Source index per destination index: the half-pixel-center coordinate
// (dst+0.5)*src_n/dst_n - 0.5 rounded to the nearest integer, ties toward
// the lower index, clamped to the source range. Exact in integers.
std::vector<Eigen::Index> nearest_index_map(Eigen::Index dst_n, Eigen::Index src_n) {
  std::vector<Eigen::Index> map(dst_n);
  for (Eigen::Index dst = 0; dst < dst_n; ++dst) {
    std::int64_t num = (2 * dst + 1) * src_n - 2 * dst_n;
    std::int64_t idx = ceil_div(num, 2 * static_cast<std::int64_t>(dst_n));
    map[dst] = static_cast<Eigen::Index>(std::clamp<std::int64_t>(idx, 0, src_n - 1));
  }
  return map;
}

struct LinearTap {
  Eigen::Index lo = 0;
  Eigen::Index hi = 0;
  double frac = 0.0;
};

std::vector<LinearTap> linear_taps(Eigen::Index dst_n, Eigen::Index src_n) {
  std::vector<LinearTap> taps(dst_n);
  const double scale = static_cast<double>(src_n) / static_cast<double>(dst_n);
  for (Eigen::Index dst = 0; dst < dst_n; ++dst) {
    double x = (dst + 0.5) * scale - 0.5;
    x = std::clamp(x, 0.0, static_cast<double>(src_n - 1));
    Eigen::Index lo = static_cast<Eigen::Index>(std::floor(x));
    taps[dst] = {lo, std::min(lo + 1, src_n - 1), x - static_cast<double>(lo)};
  }
  return taps;
}

void check_target(Size2D target) {
  if (target.width < 1 || target.height < 1) {
    throw Error("resize target must be at least 1x1");
  }
}

}  // namespace

ConditionSpec ConditionSpec::scaled(std::string name, double scale) {
  ConditionSpec c;
  c.name = std::move(name);
  c.scale = scale;
  c.validate();
  return c;
}

ConditionSpec ConditionSpec::sized(std::string name, Size2D size) {
  ConditionSpec c;
  c.name = std::move(name);
  c.size = size;
  c.validate();
  return c;
}

void ConditionSpec::validate() const {
  if (name.empty()) throw Error("condition has no name");
  if (scale.has_value() == size.has_value()) {
    throw Error("condition " + name + " must set exactly one of scale or size");
  }
  if (scale && !(*scale > 0.0 && *scale <= 1.0)) {
    throw Error("condition " + name + " scale must lie in (0, 1]");
  }
  if (size && (size->width < 1 || size->height < 1)) {
    throw Error("condition " + name + " size must be positive");
  }
}

std::vector<ConditionSpec> table_conditions(const std::string& dataset) {
  std::vector<ConditionSpec> out = {
      ConditionSpec::scaled("R1", 1.0),
      ConditionSpec::scaled("R2", 0.75),
      ConditionSpec::scaled("R3", 0.5),
      ConditionSpec::scaled("R4", 0.25),
  };
  if (dataset == "DRIVE" || dataset == "STARE" || dataset == "CHASE_DB1" ||
      dataset == "HRF") {
    out.push_back(ConditionSpec::sized("R5", {512, 512}));
  } else if (dataset == "FIVES") {
    out.push_back(ConditionSpec::sized("R5", {256, 256}));
  }
  return out;
}

std::vector<std::pair<std::string, Size2D>> known_dataset_sizes() {
  return {
      {"CHASE_DB1", {1280, 960}},
      {"DRIVE", {565, 584}},
      {"FIVES", {2048, 2048}},
      {"HRF", {3504, 2336}},
      {"STARE", {700, 605}},
  };
}

std::vector<ConditionSpec> load_conditions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open conditions file " + path.string());
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("conditions file is not valid JSON: ") + e.what());
  }
  if (!root.is_array() || root.empty()) {
    throw Error("conditions file must hold a non-empty array");
  }
  std::vector<ConditionSpec> out;
  for (const auto& jc : root) {
    if (!jc.contains("name")) throw Error("condition entry missing name");
    std::string name = jc["name"].get<std::string>();
    if (jc.contains("scale")) {
      out.push_back(ConditionSpec::scaled(name, jc["scale"].get<double>()));
    } else if (jc.contains("width") && jc.contains("height")) {
      out.push_back(ConditionSpec::sized(
          name, {jc["width"].get<int>(), jc["height"].get<int>()}));
    } else {
      throw Error("condition " + name + " must set scale or width/height");
    }
  }
  return out;
}

std::vector<std::pair<std::string, Size2D>> condition_sizes(
    Size2D native, const std::vector<ConditionSpec>& conditions) {
  if (native.width < 1 || native.height < 1) {
    throw Error("native size must be positive");
  }
  std::vector<std::pair<std::string, Size2D>> out;
  out.reserve(conditions.size());
  for (const auto& c : conditions) {
    c.validate();
    Size2D s;
    if (c.scale) {
      s.width = static_cast<int>(std::floor(native.width * *c.scale));
      s.height = static_cast<int>(std::floor(native.height * *c.scale));
    } else {
      s = *c.size;
    }
    if (s.width < 1 || s.height < 1) {
      throw Error("condition " + c.name + " collapses " + native.str() +
                  " below one pixel");
    }
    out.emplace_back(c.name, s);
  }
  return out;
}

ProbabilityMap resize_bilinear(const ProbabilityMap& src, Size2D target) {
  check_target(target);
  if (src.empty()) throw Error("resize of an empty probability map");

  const auto col_taps = linear_taps(target.width, src.width());
  const auto row_taps = linear_taps(target.height, src.height());
  const auto& sp = src.plane();

  Plane<double> out(target.height, target.width);
  for (Eigen::Index r = 0; r < target.height; ++r) {
    const LinearTap& rt = row_taps[r];
    for (Eigen::Index c = 0; c < target.width; ++c) {
      const LinearTap& ct = col_taps[c];
      double top = sp(rt.lo, ct.lo) * (1.0 - ct.frac) + sp(rt.lo, ct.hi) * ct.frac;
      double bot = sp(rt.hi, ct.lo) * (1.0 - ct.frac) + sp(rt.hi, ct.hi) * ct.frac;
      out(r, c) = std::clamp(top * (1.0 - rt.frac) + bot * rt.frac, 0.0, 1.0);
    }
  }
  return ProbabilityMap(std::move(out));
}

BinaryMask resize_nearest(const BinaryMask& src, Size2D target) {
  check_target(target);
  if (src.empty()) throw Error("resize of an empty mask");

  const auto col_map = nearest_index_map(target.width, src.width());
  const auto row_map = nearest_index_map(target.height, src.height());
  const auto& sp = src.plane();

  Plane<std::uint8_t> out(target.height, target.width);
  for (Eigen::Index r = 0; r < target.height; ++r) {
    for (Eigen::Index c = 0; c < target.width; ++c) {
      out(r, c) = sp(row_map[r], col_map[c]);
    }
  }
  return BinaryMask(std::move(out));
}

std::vector<DecimationRow> decimation_audit(const BinaryMask& mask,
                                            const StratumLabels& labels,
                                            const std::vector<ConditionSpec>& conditions) {
  if (labels.size() != mask.size()) {
    throw Error("stratum labels do not match the audited mask");
  }
  const auto sizes = condition_sizes(mask.size(), conditions);

  std::vector<DecimationRow> rows;
  rows.reserve(sizes.size());
  for (const auto& [name, processed] : sizes) {
    BinaryMask down = resize_nearest(mask, processed);
    BinaryMask up = resize_nearest(down, mask.size());

    std::int64_t kept[4] = {0, 0, 0, 0};
    std::int64_t total[4] = {0, 0, 0, 0};
    for (int r = 0; r < mask.height(); ++r) {
      for (int c = 0; c < mask.width(); ++c) {
        auto label = static_cast<int>(labels.plane()(r, c));
        if (label == 0) continue;
        ++total[label];
        if (up(r, c)) ++kept[label];
      }
    }

    DecimationRow row;
    row.condition = name;
    row.processed = processed;
    auto fraction = [](std::int64_t k, std::int64_t t) -> std::optional<double> {
      if (t == 0) return std::nullopt;
      return static_cast<double>(k) / static_cast<double>(t);
    };
    row.retention.thin = fraction(kept[1], total[1]);
    row.retention.medium = fraction(kept[2], total[2]);
    row.retention.thick = fraction(kept[3], total[3]);
    row.retention.overall =
        fraction(kept[1] + kept[2] + kept[3], total[1] + total[2] + total[3]);
    row.retention.lost = {total[1] - kept[1], total[2] - kept[2], total[3] - kept[3]};
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace vaudit
