#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace vaudit {

// Dense row-major pixel plane indexed as (row, col).
template <class Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Size2D {
  int width = 0;
  int height = 0;

  bool operator==(const Size2D&) const = default;

  [[nodiscard]] std::int64_t pixel_count() const {
    return static_cast<std::int64_t>(width) * height;
  }
  [[nodiscard]] std::string str() const {
    return std::to_string(width) + "x" + std::to_string(height);
  }
};

// Ground-truth / prediction mask. Every element is 0 or 1.
class BinaryMask {
 public:
  BinaryMask() = default;

  explicit BinaryMask(Plane<std::uint8_t> values) : plane_(std::move(values)) {
    if ((plane_ > 1).any()) {
      throw Error("binary mask contains values other than 0 and 1");
    }
  }

  static BinaryMask zeros(Size2D size) {
    return BinaryMask(Plane<std::uint8_t>::Zero(size.height, size.width));
  }

  [[nodiscard]] int width() const { return static_cast<int>(plane_.cols()); }
  [[nodiscard]] int height() const { return static_cast<int>(plane_.rows()); }
  [[nodiscard]] Size2D size() const { return {width(), height()}; }
  [[nodiscard]] bool empty() const { return plane_.size() == 0; }

  [[nodiscard]] std::uint8_t operator()(Eigen::Index row, Eigen::Index col) const {
    return plane_(row, col);
  }

  [[nodiscard]] const Plane<std::uint8_t>& plane() const { return plane_; }

  [[nodiscard]] std::int64_t foreground_count() const {
    return (plane_ != 0).count();
  }

  bool operator==(const BinaryMask& other) const {
    return plane_.rows() == other.plane_.rows() &&
           plane_.cols() == other.plane_.cols() &&
           (plane_ == other.plane_).all();
  }

 private:
  Plane<std::uint8_t> plane_;
};

// Soft segmentation output. Every element lies in [0, 1].
class ProbabilityMap {
 public:
  ProbabilityMap() = default;

  explicit ProbabilityMap(Plane<double> values) : plane_(std::move(values)) {
    if (!plane_.isFinite().all() || (plane_ < 0.0).any() || (plane_ > 1.0).any()) {
      throw Error("probability map contains values outside [0, 1]");
    }
  }

  [[nodiscard]] int width() const { return static_cast<int>(plane_.cols()); }
  [[nodiscard]] int height() const { return static_cast<int>(plane_.rows()); }
  [[nodiscard]] Size2D size() const { return {width(), height()}; }
  [[nodiscard]] bool empty() const { return plane_.size() == 0; }

  [[nodiscard]] double operator()(Eigen::Index row, Eigen::Index col) const {
    return plane_(row, col);
  }

  [[nodiscard]] const Plane<double>& plane() const { return plane_; }

 private:
  Plane<double> plane_;
};

// Pixels with probability >= threshold become foreground.
inline BinaryMask binarize(const ProbabilityMap& prob, double threshold) {
  return BinaryMask((prob.plane() >= threshold).cast<std::uint8_t>());
}

}  // namespace vaudit
