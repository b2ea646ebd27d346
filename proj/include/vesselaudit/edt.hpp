#pragma once

#include <cstdint>
#include <filesystem>

#include "vesselaudit/raster.hpp"

namespace vaudit {

// Exact Euclidean distance-to-background field over a mask. Squared
// distances are the canonical representation; real distances are derived.
class DistanceMap {
 public:
  DistanceMap() = default;

  explicit DistanceMap(Plane<std::int64_t> squared) : squared_(std::move(squared)) {
    if ((squared_ < 0).any()) {
      throw Error("distance map contains negative squared distances");
    }
    values_ = squared_.cast<double>().sqrt();
  }

  [[nodiscard]] int width() const { return static_cast<int>(squared_.cols()); }
  [[nodiscard]] int height() const { return static_cast<int>(squared_.rows()); }
  [[nodiscard]] Size2D size() const { return {width(), height()}; }

  [[nodiscard]] const Plane<std::int64_t>& squared() const { return squared_; }
  [[nodiscard]] const Plane<double>& values() const { return values_; }

 private:
  Plane<std::int64_t> squared_;
  Plane<double> values_;
};

// Exact two-pass transform; integer arithmetic throughout. Background
// pixels get distance 0, foreground pixels the distance to the nearest
// background pixel. Throws when the mask has no background pixel.
DistanceMap euclidean_distance_transform(const BinaryMask& mask);

// Debug dump: little-endian 32-bit float raster at `path`, plus a text
// header "<width> <height>" at "<path>.hdr".
void dump_distance_map(const DistanceMap& dmap, const std::filesystem::path& path);

}  // namespace vaudit
