#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "vesselaudit/edt.hpp"
#include "vesselaudit/phantom.hpp"

using namespace vaudit;

namespace {

BinaryMask full_width_band(int height, int width, int first_row, int thickness) {
  Plane<std::uint8_t> m = Plane<std::uint8_t>::Zero(height, width);
  for (int r = first_row; r < first_row + thickness; ++r)
    for (int c = 0; c < width; ++c) m(r, c) = 1;
  return BinaryMask(std::move(m));
}

}  // namespace

TEST_CASE("single foreground pixel is one step from background") {
  Plane<std::uint8_t> m = Plane<std::uint8_t>::Zero(3, 3);
  m(1, 1) = 1;
  const auto dmap = euclidean_distance_transform(BinaryMask(std::move(m)));
  CHECK(dmap.squared()(1, 1) == 1);
  CHECK(dmap.values()(1, 1) == 1.0);
  CHECK(dmap.squared().sum() == 1);
}

TEST_CASE("all-background mask is identically zero") {
  const auto dmap = euclidean_distance_transform(BinaryMask::zeros({7, 4}));
  CHECK((dmap.squared() == 0).all());
}

TEST_CASE("full-width band has a vertical distance profile") {
  const auto mask = full_width_band(9, 20, 2, 5);
  const auto dmap = euclidean_distance_transform(mask);
  const std::vector<std::int64_t> expected{1, 4, 9, 4, 1};
  for (int c = 0; c < 20; ++c)
    for (int i = 0; i < 5; ++i) CHECK(dmap.squared()(2 + i, c) == expected[i]);
}

TEST_CASE("single background pixel anchors every distance") {
  Plane<std::uint8_t> m = Plane<std::uint8_t>::Ones(8, 8);
  m(0, 0) = 0;
  const auto dmap = euclidean_distance_transform(BinaryMask(std::move(m)));
  for (Eigen::Index r = 0; r < 8; ++r)
    for (Eigen::Index c = 0; c < 8; ++c) CHECK(dmap.squared()(r, c) == r * r + c * c);
}

TEST_CASE("matches the exhaustive scan on random masks") {
  std::mt19937 rng(101);
  for (int percent : {10, 30, 50, 80, 95}) {
    for (int rep = 0; rep < 5; ++rep) {
      auto mask = testing::random_mask(rng, 32, 32, percent);
      if (mask.foreground_count() == mask.size().pixel_count()) continue;
      const auto dmap = euclidean_distance_transform(mask);
      const auto expected = testing::oracle_squared_edt(mask);
      CHECK((dmap.squared() == expected).all());
    }
  }
}

TEST_CASE("matches the exhaustive scan on non-square masks") {
  std::mt19937 rng(202);
  for (auto [h, w] : {std::pair{5, 41}, std::pair{41, 5}, std::pair{1, 17}, std::pair{17, 1}}) {
    auto mask = testing::random_mask(rng, h, w, 60);
    if (mask.foreground_count() == mask.size().pixel_count()) continue;
    const auto dmap = euclidean_distance_transform(mask);
    CHECK((dmap.squared() == testing::oracle_squared_edt(mask)).all());
  }
}

TEST_CASE("transposing the mask transposes the field") {
  std::mt19937 rng(303);
  const auto mask = testing::random_mask(rng, 19, 11, 55);
  const auto dmap = euclidean_distance_transform(mask);
  BinaryMask transposed{Plane<std::uint8_t>(mask.plane().transpose())};
  const auto dmapt = euclidean_distance_transform(transposed);
  CHECK((dmapt.squared().transpose() == dmap.squared()).all());
}

TEST_CASE("distances are 1-Lipschitz along rows and columns") {
  std::mt19937 rng(404);
  const auto mask = testing::random_mask(rng, 24, 24, 70);
  const auto dmap = euclidean_distance_transform(mask);
  const auto& d = dmap.values();
  for (Eigen::Index r = 0; r < 24; ++r)
    for (Eigen::Index c = 0; c + 1 < 24; ++c)
      CHECK(std::abs(d(r, c) - d(r, c + 1)) <= 1.0 + 1e-12);
  for (Eigen::Index c = 0; c < 24; ++c)
    for (Eigen::Index r = 0; r + 1 < 24; ++r)
      CHECK(std::abs(d(r, c) - d(r + 1, c)) <= 1.0 + 1e-12);
}

TEST_CASE("refuses masks without a background reference") {
  CHECK_THROWS_AS(euclidean_distance_transform(BinaryMask(Plane<std::uint8_t>::Ones(4, 4))),
                  Error);
  CHECK_THROWS_AS(euclidean_distance_transform(BinaryMask(Plane<std::uint8_t>(0, 0))), Error);
}

TEST_CASE("dump writes a float raster with a text header") {
  Plane<std::uint8_t> m = Plane<std::uint8_t>::Zero(2, 3);
  m(1, 1) = 1;
  const auto dmap = euclidean_distance_transform(BinaryMask(std::move(m)));

  const auto path = std::filesystem::temp_directory_path() / "vaudit_edt_dump.f32";
  dump_distance_map(dmap, path);

  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  float buf[6];
  REQUIRE(std::fread(buf, sizeof(float), 6, f) == 6);
  std::fclose(f);
  CHECK(buf[4] == 1.0f);  // row 1, col 1
  CHECK(buf[0] == 0.0f);

  std::FILE* h = std::fopen((path.string() + ".hdr").c_str(), "rb");
  REQUIRE(h != nullptr);
  char line[32] = {0};
  REQUIRE(std::fgets(line, sizeof line, h) != nullptr);
  std::fclose(h);
  CHECK(std::string(line).starts_with("3 2"));
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".hdr");
}

TEST_CASE("suite members match the exhaustive scan") {
  for (const auto& member : standard_suite()) {
    if (member.name != "band5" && member.name != "tree42") continue;
    const auto dmap = euclidean_distance_transform(member.mask);
    CHECK((dmap.squared() == testing::oracle_squared_edt(member.mask)).all());
  }
}
