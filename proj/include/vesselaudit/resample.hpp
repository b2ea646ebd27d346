#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vesselaudit/raster.hpp"
#include "vesselaudit/stratify.hpp"

namespace vaudit {

// A processing condition: either an isotropic scale in (0, 1] applied to a
// native size, or an explicit target size.
struct ConditionSpec {
  std::string name;
  std::optional<double> scale;
  std::optional<Size2D> size;

  static ConditionSpec scaled(std::string name, double scale);
  static ConditionSpec sized(std::string name, Size2D size);

  void validate() const;
};

// The five-condition ladder R1..R5: scales 1.0/0.75/0.5/0.25 plus an
// explicit fifth size (512x512, or 256x256 for FIVES).
std::vector<ConditionSpec> table_conditions(const std::string& dataset);

// Native acquisition sizes of the five public fundus benchmarks.
std::vector<std::pair<std::string, Size2D>> known_dataset_sizes();

// Loads a JSON array of {"name", "scale"} / {"name", "width", "height"}.
std::vector<ConditionSpec> load_conditions(const std::filesystem::path& path);

// Resolves each condition against a native size. Scaled dimensions are
// floor(native * scale); a resulting dimension below 1 is an error.
std::vector<std::pair<std::string, Size2D>> condition_sizes(
    Size2D native, const std::vector<ConditionSpec>& conditions);

// Half-pixel-center bilinear interpolation, output clamped to [0, 1].
ProbabilityMap resize_bilinear(const ProbabilityMap& src, Size2D target);

// Half-pixel-center nearest neighbour; source index is the half-pixel
// coordinate rounded with ties toward the lower index. Exact integer
// arithmetic, so a same-size resize is the identity.
BinaryMask resize_nearest(const BinaryMask& src, Size2D target);

// Per-stratum survival of ground-truth pixels under a nearest-neighbour
// down/up round trip. A fraction is absent when its stratum is empty.
struct StratumRetention {
  std::optional<double> thin;
  std::optional<double> medium;
  std::optional<double> thick;
  std::optional<double> overall;
  StratumCounts lost;
};

struct DecimationRow {
  std::string condition;
  Size2D processed;
  StratumRetention retention;
};

// For each condition: resize `mask` down to the condition size and back to
// native, then report which labelled pixels survived. `labels` must be the
// stratification of `mask`.
std::vector<DecimationRow> decimation_audit(const BinaryMask& mask,
                                            const StratumLabels& labels,
                                            const std::vector<ConditionSpec>& conditions);

}  // namespace vaudit
