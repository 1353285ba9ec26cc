#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "skinseg/error.hpp"

namespace skinseg {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 2-D grid of values. Dimensions are fixed at construction.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 1 || height < 1)
      throw Error(ErrorCode::InvalidArgument, "grid dimensions must be >= 1");
    values_.assign(static_cast<std::size_t>(width) * height, fill);
  }
  Grid(int width, int height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    if (width < 1 || height < 1)
      throw Error(ErrorCode::InvalidArgument, "grid dimensions must be >= 1");
    if (values_.size() != static_cast<std::size_t>(width) * height)
      throw Error(ErrorCode::InvalidArgument,
                  "pixel buffer length does not match width x height");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& at(int x, int y) { return values_[index(x, y)]; }
  const T& at(int x, int y) const { return values_[index(x, y)]; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

using RgbImage = Grid<Rgb>;
/// 8-bit channel plane, values 0..255.
using ScalarPlane = Grid<std::uint8_t>;
/// Binary mask; nonzero means set. Producers in this library write 0 or 1.
using SkinMask = Grid<std::uint8_t>;
using EdgeMap = Grid<std::uint8_t>;

template <typename T, typename U>
void require_same_shape(const Grid<T>& a, const Grid<U>& b, const char* what) {
  if (!a.same_shape(b))
    throw Error(ErrorCode::DimensionMismatch,
                std::string("dimension mismatch: ") + what);
}

}  // namespace skinseg
