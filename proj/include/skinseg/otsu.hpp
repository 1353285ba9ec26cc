#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "skinseg/colorspace.hpp"
#include "skinseg/image.hpp"

namespace skinseg {

struct Histogram256 {
  std::array<std::uint64_t, 256> bins{};
  std::uint64_t total = 0;

  void add(std::uint8_t v, std::uint64_t count = 1) {
    bins[v] += count;
    total += count;
  }
};

Histogram256 histogram(const ScalarPlane& plane);

// Objective values within this relative distance of the maximum count as
// ties; the smallest threshold (vector) among them wins.
inline constexpr double kOtsuTieTolerance = 1e-12;

/// Between-class variance of the classes {<= t0}, {t0 < v <= t1}, ...,
/// {> t_last}. Thresholds must be ascending.
double between_class_variance(const Histogram256& h, std::span<const int> thresholds);

struct OtsuResult {
  std::vector<int> thresholds;  // ascending, each in [0, 254]
  bool degenerate = false;      // all mass in a single bin
};

/// Classic two-class Otsu; returns one threshold.
OtsuResult otsu_threshold(const Histogram256& h);

/// Exhaustive k-class Otsu, 2 <= k <= 4. k = 2 is otsu_threshold.
OtsuResult otsu_multilevel(const Histogram256& h, int k);

/// Ordinal class of a value: the number of thresholds strictly below it.
inline std::uint8_t class_of(std::uint8_t v, std::span<const int> thresholds) {
  std::uint8_t label = 0;
  for (int t : thresholds) label += v > t ? 1 : 0;
  return label;
}

struct ChannelClassMaps {
  std::vector<ChannelId> channels;
  int k = 3;
  std::vector<Grid<std::uint8_t>> maps;        // labels in [0, k-1]
  std::vector<std::vector<int>> thresholds;    // per channel
  std::vector<bool> degenerate;                // per channel

  int width() const { return maps.empty() ? 0 : maps.front().width(); }
  int height() const { return maps.empty() ? 0 : maps.front().height(); }
};

ChannelClassMaps segment_channels(const RgbImage& img,
                                  std::span<const ChannelId> channels, int k);

}  // namespace skinseg
