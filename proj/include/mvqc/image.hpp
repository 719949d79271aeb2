#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvqc/error.hpp"

namespace mvqc {

/// Row-major 2-D pixel grid. x is the column, y is the row, both 0-based.
/// The Tag parameter keeps gray images, masks and label maps distinct types.
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims();
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Raster(int width, int height, std::vector<T> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims();
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      throw Error("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                  std::to_string(width) + "x" + std::to_string(height));
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  T operator()(int x, int y) const noexcept { return pixels_[index(x, y)]; }
  T& operator()(int x, int y) noexcept { return pixels_[index(x, y)]; }

  std::span<const T> pixels() const noexcept { return pixels_; }
  std::span<T> pixels() noexcept { return pixels_; }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  void check_dims() const {
    if (width_ < 1 || height_ < 1)
      throw Error("image dimensions must be positive, got " + std::to_string(width_) + "x" +
                  std::to_string(height_));
  }

  int width_;
  int height_;
  std::vector<T> pixels_;
};

struct GrayTag;
struct MaskTag;
struct LabelTag;

/// 8-bit intensities in [0,255].
using GrayImage = Raster<std::uint8_t, GrayTag>;
/// Foreground mask; every pixel is 0 or 1.
using BinaryImage = Raster<std::uint8_t, MaskTag>;

/// Connected-component labels: 0 is background, components are 1..num.
struct LabelMap {
  Raster<int, LabelTag> labels;
  int num = 0;
};

}  // namespace mvqc
