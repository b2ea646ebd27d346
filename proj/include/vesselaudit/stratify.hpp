#pragma once

#include <cstdint>

#include "vesselaudit/edt.hpp"
#include "vesselaudit/raster.hpp"

namespace vaudit {

enum class Stratum : std::uint8_t {
  background = 0,
  thin = 1,
  medium = 2,
  thick = 3,
};

// Width-class boundaries in pixels of distance to background:
// thin d < thin_below, medium thin_below <= d <= thick_above, thick d > thick_above.
struct StratumThresholds {
  double thin_below = 3.0;
  double thick_above = 7.0;

  void validate() const {
    if (!(thin_below > 0.0) || !(thick_above >= thin_below)) {
      throw Error("stratum thresholds must satisfy 0 < thin <= thick");
    }
  }
};

// Per-pixel width-class labels; background exactly where the source mask is 0.
class StratumLabels {
 public:
  StratumLabels() = default;

  explicit StratumLabels(Plane<std::uint8_t> labels) : labels_(std::move(labels)) {
    if ((labels_ > 3).any()) {
      throw Error("stratum labels must lie in 0..3");
    }
  }

  [[nodiscard]] int width() const { return static_cast<int>(labels_.cols()); }
  [[nodiscard]] int height() const { return static_cast<int>(labels_.rows()); }
  [[nodiscard]] Size2D size() const { return {width(), height()}; }

  [[nodiscard]] Stratum operator()(Eigen::Index row, Eigen::Index col) const {
    return static_cast<Stratum>(labels_(row, col));
  }

  [[nodiscard]] const Plane<std::uint8_t>& plane() const { return labels_; }

  bool operator==(const StratumLabels& other) const {
    return labels_.rows() == other.labels_.rows() &&
           labels_.cols() == other.labels_.cols() &&
           (labels_ == other.labels_).all();
  }

 private:
  Plane<std::uint8_t> labels_;
};

struct StratumCounts {
  std::int64_t thin = 0;
  std::int64_t medium = 0;
  std::int64_t thick = 0;

  [[nodiscard]] std::int64_t total() const { return thin + medium + thick; }
  bool operator==(const StratumCounts&) const = default;
};

// Labels every foreground pixel of `mask` by its distance-map value.
// `dmap` must be the distance transform of `mask` at the same size.
StratumLabels stratify(const DistanceMap& dmap, const BinaryMask& mask,
                       const StratumThresholds& thresholds);

StratumCounts stratum_counts(const StratumLabels& labels);

}  // namespace vaudit
