#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "skinseg/image.hpp"

namespace skinseg {

// Scalar channels drawn from the colour spaces the segmenter can fuse.
// Xy is the Y of XYZ, Vv the v of Luv, La the L of Lab; the plain Y, V and L
// belong to YCbCr, HSV and Luv respectively.
enum class ChannelId : std::uint8_t {
  Y, Cb, Cr,
  H, S, V,
  I, Q,
  X, Xy, Z,
  C, M, Ye, K,
  L, U, Vv,
  La, A, B,
  Ch, Hh,
};

inline constexpr std::size_t kChannelCount = 23;

std::string_view channel_name(ChannelId id);
std::optional<ChannelId> parse_channel(std::string_view name);
const std::array<ChannelId, kChannelCount>& all_channels();

struct YCbCr {
  std::uint8_t y = 0;
  std::uint8_t cb = 128;
  std::uint8_t cr = 128;

  friend bool operator==(const YCbCr&, const YCbCr&) = default;
};

/// Full-range BT.601 (JPEG) conversion, rounded half away from zero.
YCbCr rgb_to_ycbcr(Rgb rgb);

/// Round half away from zero, then clamp to [0, 255].
std::uint8_t to_byte(double v);

/// Unnormalised CIE L*a*b* (D65, sRGB primaries).
struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};
Lab rgb_to_lab(Rgb rgb);

/// One channel value of one pixel, normalised to 0..255 over the channel's
/// fixed theoretical range.
std::uint8_t channel_value(Rgb rgb, ChannelId id);

/// channel_value before rounding and clamping.
double channel_raw(Rgb rgb, ChannelId id);

ScalarPlane extract_plane(const RgbImage& img, ChannelId id);

/// Luma plane; the grey input of the edge detector.
ScalarPlane luminance_gray(const RgbImage& img);

}  // namespace skinseg
