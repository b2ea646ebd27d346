#include <limits>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "vesselaudit/edt.hpp"
#include "vesselaudit/stratify.hpp"

using namespace vaudit;

namespace {

BinaryMask full_width_band(int height, int width, int first_row, int thickness) {
  Plane<std::uint8_t> m = Plane<std::uint8_t>::Zero(height, width);
  for (int r = first_row; r < first_row + thickness; ++r)
    for (int c = 0; c < width; ++c) m(r, c) = 1;
  return BinaryMask(std::move(m));
}

}  // namespace

TEST_CASE("five-pixel band splits into thin rim and medium core") {
  const auto mask = full_width_band(9, 12, 2, 5);
  const auto labels = stratify(euclidean_distance_transform(mask), mask, {});
  // distances down the band: 1, 2, 3, 2, 1
  const Stratum expected[5] = {Stratum::thin, Stratum::thin, Stratum::medium,
                               Stratum::thin, Stratum::thin};
  for (int c = 0; c < 12; ++c)
    for (int i = 0; i < 5; ++i) CHECK(labels(2 + i, c) == expected[i]);
  CHECK(labels(0, 0) == Stratum::background);
}

TEST_CASE("boundary distances land on the medium side of both thresholds") {
  const auto mask = full_width_band(9, 12, 2, 5);
  const auto dmap = euclidean_distance_transform(mask);
  // d == thick_above stays medium: with thresholds (1, 2) the band rows
  // score d = 1, 2, 3, 2, 1 -> medium, medium, thick, medium, medium.
  const auto labels = stratify(dmap, mask, {1.0, 2.0});
  const Stratum expected[5] = {Stratum::medium, Stratum::medium, Stratum::thick,
                               Stratum::medium, Stratum::medium};
  for (int i = 0; i < 5; ++i) CHECK(labels(2 + i, 0) == expected[i]);
}

TEST_CASE("an isolated pixel is thin") {
  Plane<std::uint8_t> m = Plane<std::uint8_t>::Zero(5, 5);
  m(2, 2) = 1;
  const BinaryMask mask(std::move(m));
  const auto labels = stratify(euclidean_distance_transform(mask), mask, {});
  CHECK(labels(2, 2) == Stratum::thin);
  CHECK((stratum_counts(labels) == StratumCounts{1, 0, 0}));
}

TEST_CASE("labels partition the foreground") {
  std::mt19937 rng(77);
  for (int rep = 0; rep < 4; ++rep) {
    const auto mask = testing::random_mask(rng, 21, 17, 60);
    if (mask.foreground_count() == mask.size().pixel_count()) continue;
    const auto labels = stratify(euclidean_distance_transform(mask), mask, {});
    CHECK(stratum_counts(labels).total() == mask.foreground_count());
    for (Eigen::Index r = 0; r < 21; ++r)
      for (Eigen::Index c = 0; c < 17; ++c)
        CHECK((labels(r, c) == Stratum::background) == (mask(r, c) == 0));
  }
}

TEST_CASE("an unbounded thin threshold captures everything") {
  const auto mask = full_width_band(20, 20, 2, 15);
  const double inf = std::numeric_limits<double>::infinity();
  const auto labels = stratify(euclidean_distance_transform(mask), mask, {inf, inf});
  const auto counts = stratum_counts(labels);
  CHECK(counts.thin == mask.foreground_count());
  CHECK(counts.medium == 0);
  CHECK(counts.thick == 0);
}

TEST_CASE("raising the thin boundary only grows the thin class") {
  std::mt19937 rng(88);
  const auto mask = testing::random_mask(rng, 25, 25, 85);
  const auto dmap = euclidean_distance_transform(mask);
  const auto narrow = stratify(dmap, mask, {2.0, 7.0});
  const auto wide = stratify(dmap, mask, {4.0, 7.0});
  for (Eigen::Index r = 0; r < 25; ++r)
    for (Eigen::Index c = 0; c < 25; ++c)
      if (narrow(r, c) == Stratum::thin) CHECK(wide(r, c) == Stratum::thin);
  CHECK(stratum_counts(wide).thin >= stratum_counts(narrow).thin);
}

TEST_CASE("threshold validation") {
  CHECK_THROWS_AS((StratumThresholds{0.0, 7.0}.validate()), Error);
  CHECK_THROWS_AS((StratumThresholds{-1.0, 7.0}.validate()), Error);
  CHECK_THROWS_AS((StratumThresholds{5.0, 4.0}.validate()), Error);
  CHECK_NOTHROW((StratumThresholds{3.0, 3.0}.validate()));
}

TEST_CASE("mismatched inputs are rejected") {
  const auto mask = full_width_band(9, 12, 2, 5);
  const auto dmap = euclidean_distance_transform(mask);

  const auto other = full_width_band(9, 13, 2, 5);
  CHECK_THROWS_AS(stratify(dmap, other, {}), Error);

  // same size, but the field is not this mask's transform
  const auto shifted = full_width_band(9, 12, 3, 5);
  CHECK_THROWS_AS(stratify(dmap, shifted, {}), Error);
}

TEST_CASE("stratum label plane rejects values above 3") {
  Plane<std::uint8_t> bad(1, 1);
  bad << 4;
  CHECK_THROWS_AS(StratumLabels{std::move(bad)}, Error);
}
