#pragma once

#include <cstdint>

#include "skinseg/image.hpp"
#include "skinseg/skinmodel.hpp"

namespace skinseg {

enum class Ternary : std::uint8_t { Black = 0, Gray = 128, White = 255 };

using TernaryImage = Grid<Ternary>;

struct SeedParams {
  double k = 2.0;     // weight of the 3x3 ring
  double th1 = -6.0;  // below: black
  double th2 = 6.0;   // above: white

  void validate() const;
};

TernaryImage make_ternary(const RgbImage& img, const SkinClusterModel& model);

/// Weighted neighbourhood score: K times the signed 3x3-ring count plus the
/// signed 5x5-ring count (white +1, gray 0, black -1). Requires (x, y) to be
/// at least two pixels from every border.
double neighbor_score(const TernaryImage& t, int x, int y, double k);

enum class ScanOrder { Forward, Reverse };

/// One pass over the interior, reading only the input image. White and
/// border pixels are copied unchanged.
TernaryImage refine_ternary(const TernaryImage& t, const SeedParams& p,
                            ScanOrder order = ScanOrder::Forward);

SkinMask extract_seed(const TernaryImage& t);

}  // namespace skinseg
