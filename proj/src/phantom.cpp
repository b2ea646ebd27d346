#include "vesselaudit/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vesselaudit/edt.hpp"

namespace vaudit {
namespace {

int checked_dim(int v, const char* what) {
  if (v < 1) throw Error(std::string("phantom ") + what + " must be positive");
  return v;
}

GeneratedPhantom make_bands(const PhantomSpec& spec) {
  const int h = checked_dim(spec.canvas.height, "canvas height");
  const int w = checked_dim(spec.canvas.width, "canvas width");
  const int t = checked_dim(spec.thickness, "thickness");
  if (spec.row_offsets.empty()) throw Error("band phantom needs row offsets");

  Plane<std::uint8_t> img = Plane<std::uint8_t>::Zero(h, w);
  GeneratedPhantom out;
  for (int off : spec.row_offsets) {
    if (off < 0 || off + t > h) throw Error("band leaves the canvas");
    for (int r = off; r < off + t; ++r) {
      for (int c = spec.inset; c < w - spec.inset; ++c) img(r, c) = 1;
    }
    out.expected.push_back(
        {"band@" + std::to_string(off), std::ceil(t / 2.0)});
  }
  out.mask = BinaryMask(std::move(img));
  return out;
}

GeneratedPhantom make_disk(const PhantomSpec& spec, bool ring) {
  const int h = checked_dim(spec.canvas.height, "canvas height");
  const int w = checked_dim(spec.canvas.width, "canvas width");
  if (!(spec.radius > 0.0)) throw Error("phantom radius must be positive");
  const double outer = spec.radius * spec.radius;
  double inner = -1.0;
  if (ring) {
    const double ri = spec.radius - checked_dim(spec.thickness, "ring thickness");
    if (ri <= 0.0) throw Error("ring thickness must leave a hole");
    inner = ri * ri;
  }

  Plane<std::uint8_t> img = Plane<std::uint8_t>::Zero(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double d2 = static_cast<double>(r - spec.center_row) * (r - spec.center_row) +
                        static_cast<double>(c - spec.center_col) * (c - spec.center_col);
      if (d2 <= outer && d2 > inner) img(r, c) = 1;
    }
  }

  GeneratedPhantom out;
  out.mask = BinaryMask(std::move(img));
  if (ring) {
    out.expected.push_back({"ring", std::ceil(spec.thickness / 2.0)});
  } else {
    out.expected.push_back({"disk", spec.radius});
  }
  return out;
}

// Stamps a thickness-t run perpendicular to the segment's dominant axis at
// every Bresenham point.
void draw_segment(Plane<std::uint8_t>& img, int r0, int c0, int r1, int c1, int t) {
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  const int dr = std::abs(r1 - r0);
  const int dc = std::abs(c1 - c0);
  const int sr = r0 < r1 ? 1 : -1;
  const int sc = c0 < c1 ? 1 : -1;
  const bool row_major_axis = dr >= dc;
  int err = (row_major_axis ? dr : dc) / 2;

  int r = r0, c = c0;
  for (;;) {
    for (int k = -(t - 1) / 2; k <= t / 2; ++k) {
      const int rr = row_major_axis ? r : r + k;
      const int cc = row_major_axis ? c + k : c;
      if (rr >= 0 && rr < h && cc >= 0 && cc < w) img(rr, cc) = 1;
    }
    if (r == r1 && c == c1) break;
    if (row_major_axis) {
      r += sr;
      err -= dc;
      if (err < 0) {
        c += sc;
        err += dr;
      }
    } else {
      c += sc;
      err -= dr;
      if (err < 0) {
        r += sr;
        err += dc;
      }
    }
  }
}

// Integer jitter in [-span, span]; bit-identical across platforms.
int jitter(std::mt19937& rng, int span) {
  return static_cast<int>(rng() % (2 * span + 1)) - span;
}

void grow_tree(Plane<std::uint8_t>& img, std::mt19937& rng, int r0, int c0,
               int lean, int depth, int max_depth) {
  static constexpr int kThickness[] = {7, 5, 3, 1};
  static constexpr int kRise[] = {40, 28, 20, 14};
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  const int margin = 6;

  const int idx = std::min(depth, 3);
  const int r1 = std::clamp(r0 - kRise[idx], margin, h - 1 - margin);
  const int c1 = std::clamp(c0 + lean, margin, w - 1 - margin);
  draw_segment(img, r0, c0, r1, c1, kThickness[idx]);
  if (depth >= max_depth) return;

  const int spread = kRise[std::min(depth + 1, 3)] / 2;
  const int left = -spread + jitter(rng, 3);
  const int right = spread + jitter(rng, 3);
  grow_tree(img, rng, r1, c1, left, depth + 1, max_depth);
  grow_tree(img, rng, r1, c1, right, depth + 1, max_depth);
}

GeneratedPhantom make_tree(const PhantomSpec& spec) {
  const int h = checked_dim(spec.canvas.height, "canvas height");
  const int w = checked_dim(spec.canvas.width, "canvas width");
  if (spec.depth < 0 || spec.depth > 3) {
    throw Error("tree depth must lie in 0..3");
  }

  Plane<std::uint8_t> img = Plane<std::uint8_t>::Zero(h, w);
  std::mt19937 rng(spec.seed);
  grow_tree(img, rng, h - 5, w / 2, jitter(rng, 2), 0, spec.depth);

  GeneratedPhantom out;
  out.mask = BinaryMask(std::move(img));
  static constexpr int kThickness[] = {7, 5, 3, 1};
  for (int d = 0; d <= spec.depth; ++d) {
    out.expected.push_back(
        {"depth" + std::to_string(d), std::ceil(kThickness[d] / 2.0)});
  }
  return out;
}

Phantom suite_member(std::string name, const PhantomSpec& spec) {
  GeneratedPhantom gen = generate(spec);
  DistanceMap dmap = euclidean_distance_transform(gen.mask);
  StratumLabels labels = stratify(dmap, gen.mask, StratumThresholds{});
  return {std::move(name), std::move(gen.mask), std::move(labels),
          std::move(gen.expected)};
}

}  // namespace

GeneratedPhantom generate(const PhantomSpec& spec) {
  switch (spec.kind) {
    case PhantomKind::band:
      return make_bands(spec);
    case PhantomKind::disk:
      return make_disk(spec, false);
    case PhantomKind::ring:
      return make_disk(spec, true);
    case PhantomKind::branching_tree:
      return make_tree(spec);
  }
  throw Error("unknown phantom kind");
}

std::vector<Phantom> standard_suite() {
  std::vector<Phantom> suite;

  PhantomSpec band;
  band.kind = PhantomKind::band;
  band.canvas = {128, 128};

  band.thickness = 1;
  band.row_offsets = {17, 46, 75, 104};
  band.inset = 4;
  suite.push_back(suite_member("band1", band));

  band.thickness = 2;
  suite.push_back(suite_member("band2", band));

  band.thickness = 5;
  band.row_offsets = {16, 46, 77};
  band.inset = 5;
  suite.push_back(suite_member("band5", band));

  band.thickness = 9;
  band.row_offsets = {21, 70};
  band.inset = 9;
  suite.push_back(suite_member("band9", band));

  band.thickness = 15;
  band.row_offsets = {16, 47, 78, 109};
  band.inset = 16;
  suite.push_back(suite_member("band15", band));

  PhantomSpec disk;
  disk.kind = PhantomKind::disk;
  disk.canvas = {128, 128};
  disk.center_row = 24;
  disk.center_col = 24;
  disk.radius = 10.0;
  suite.push_back(suite_member("disk10", disk));

  PhantomSpec ring;
  ring.kind = PhantomKind::ring;
  ring.canvas = {128, 128};
  ring.center_row = 96;
  ring.center_col = 96;
  ring.radius = 12.0;
  ring.thickness = 4;
  suite.push_back(suite_member("ring12", ring));

  PhantomSpec tree;
  tree.kind = PhantomKind::branching_tree;
  tree.canvas = {128, 128};
  tree.depth = 3;
  tree.seed = 42;
  suite.push_back(suite_member("tree42", tree));

  return suite;
}

}  // namespace vaudit
