#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vesselaudit/raster.hpp"
#include "vesselaudit/stratify.hpp"

namespace vaudit {

enum class PhantomKind {
  band,
  disk,
  ring,
  branching_tree,
};

// Geometry of one synthetic structure on a canvas. Fields are read per
// kind: bands use row_offsets/thickness/inset, disks use center/radius,
// rings add thickness inward from radius, trees grow from the bottom
// center with seeded jitter and per-depth thickness halving.
struct PhantomSpec {
  PhantomKind kind = PhantomKind::band;
  Size2D canvas{128, 128};
  int thickness = 1;
  std::vector<int> row_offsets;
  int inset = 0;
  int center_row = 0;
  int center_col = 0;
  double radius = 0.0;
  int depth = 3;
  std::uint32_t seed = 0;
};

struct RegionExpectation {
  std::string region;
  double nominal_peak_halfwidth = 0.0;
};

struct GeneratedPhantom {
  BinaryMask mask;
  std::vector<RegionExpectation> expected;
};

GeneratedPhantom generate(const PhantomSpec& spec);

struct Phantom {
  std::string name;
  BinaryMask mask;
  StratumLabels labels;
  std::vector<RegionExpectation> expected;
};

// Fixed eight-member suite on a 128x128 canvas: bands of thickness
// 1/2/5/9/15, a disk, a ring, and a seeded branching tree. Labels use the
// default 3/7 thresholds.
std::vector<Phantom> standard_suite();

}  // namespace vaudit
