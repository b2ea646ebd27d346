#include "vesselaudit/stratify.hpp"

namespace vaudit {

StratumLabels stratify(const DistanceMap& dmap, const BinaryMask& mask,
                       const StratumThresholds& thresholds) {
  thresholds.validate();
  if (dmap.size() != mask.size()) {
    throw Error("distance map size " + dmap.size().str() + " does not match mask size " +
                mask.size().str());
  }

  // d < t compared as d^2 < t^2; exact for integer squared distances.
  const double lo = thresholds.thin_below * thresholds.thin_below;
  const double hi = thresholds.thick_above * thresholds.thick_above;

  const int h = mask.height();
  const int w = mask.width();
  Plane<std::uint8_t> labels = Plane<std::uint8_t>::Zero(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask(r, c)) continue;
      const auto sq = static_cast<double>(dmap.squared()(r, c));
      if (sq == 0.0) {
        throw Error("distance map is zero on a foreground pixel; "
                    "it was not computed from this mask");
      }
      if (sq < lo) {
        labels(r, c) = static_cast<std::uint8_t>(Stratum::thin);
      } else if (sq <= hi) {
        labels(r, c) = static_cast<std::uint8_t>(Stratum::medium);
      } else {
        labels(r, c) = static_cast<std::uint8_t>(Stratum::thick);
      }
    }
  }
  return StratumLabels(std::move(labels));
}

StratumCounts stratum_counts(const StratumLabels& labels) {
  StratumCounts counts;
  const auto& p = labels.plane();
  counts.thin = (p == static_cast<std::uint8_t>(Stratum::thin)).count();
  counts.medium = (p == static_cast<std::uint8_t>(Stratum::medium)).count();
  counts.thick = (p == static_cast<std::uint8_t>(Stratum::thick)).count();
  return counts;
}

}  // namespace vaudit
