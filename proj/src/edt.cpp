#include "vesselaudit/edt.hpp"

#include <fstream>
#include <vector>

namespace vaudit {
namespace {

// Squared distance from column x to the parabola rooted at column i with
// vertical reach g.
inline std::int64_t parabola(std::int64_t x, std::int64_t i, std::int64_t g) {
  return (x - i) * (x - i) + g * g;
}

// Last column x at which the parabola rooted at `left` (reach gl) stays at
// or below the one rooted at `right` (reach gr); requires left < right.
inline std::int64_t crossover(std::int64_t left, std::int64_t right,
                              std::int64_t gl, std::int64_t gr) {
  std::int64_t num = right * right - left * left + gr * gr - gl * gl;
  std::int64_t den = 2 * (right - left);
  std::int64_t q = num / den;
  if (num % den != 0 && num < 0) --q;
  return q;
}

}  // namespace

DistanceMap euclidean_distance_transform(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  if (h == 0 || w == 0) throw Error("distance transform of an empty mask");
  if (mask.foreground_count() == static_cast<std::int64_t>(h) * w) {
    throw Error("distance transform has no background reference");
  }

  // Vertical pass: per column, distance in rows to the nearest background
  // pixel. Columns with no background pixel get a reach that any real
  // column beats everywhere.
  const std::int64_t unreachable = h + w;
  Plane<std::int64_t> g(h, w);
  for (int c = 0; c < w; ++c) {
    g(0, c) = mask(0, c) ? unreachable : 0;
    for (int r = 1; r < h; ++r) {
      g(r, c) = mask(r, c) ? std::min(unreachable, g(r - 1, c) + 1) : 0;
    }
    for (int r = h - 2; r >= 0; --r) {
      if (g(r + 1, c) + 1 < g(r, c)) g(r, c) = g(r + 1, c) + 1;
    }
  }

  // Horizontal pass: per row, lower envelope of the column parabolas.
  Plane<std::int64_t> sq(h, w);
  std::vector<std::int64_t> s(w), t(w);
  for (int r = 0; r < h; ++r) {
    int q = 0;
    s[0] = 0;
    t[0] = 0;
    for (std::int64_t u = 1; u < w; ++u) {
      while (q >= 0 && parabola(t[q], s[q], g(r, s[q])) > parabola(t[q], u, g(r, u))) {
        --q;
      }
      if (q < 0) {
        q = 0;
        s[0] = u;
      } else {
        std::int64_t cross = 1 + crossover(s[q], u, g(r, s[q]), g(r, u));
        if (cross < w) {
          ++q;
          s[q] = u;
          t[q] = cross;
        }
      }
    }
    for (std::int64_t u = w - 1; u >= 0; --u) {
      sq(r, u) = parabola(u, s[q], g(r, s[q]));
      if (u == t[q]) --q;
    }
  }

  return DistanceMap(std::move(sq));
}

void dump_distance_map(const DistanceMap& dmap, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string());
  for (int r = 0; r < dmap.height(); ++r) {
    for (int c = 0; c < dmap.width(); ++c) {
      float v = static_cast<float>(dmap.values()(r, c));
      static_assert(sizeof(float) == 4);
      out.write(reinterpret_cast<const char*>(&v), 4);
    }
  }
  if (!out) throw Error("write failed: " + path.string());

  std::ofstream hdr(path.string() + ".hdr");
  if (!hdr) throw Error("cannot open " + path.string() + ".hdr");
  hdr << dmap.width() << " " << dmap.height() << "\n";
}

}  // namespace vaudit
