#pragma once

#include <array>
#include <span>
#include <vector>

#include "skinseg/edges.hpp"
#include "skinseg/image.hpp"
#include "skinseg/otsu.hpp"
#include "skinseg/seedgen.hpp"

namespace skinseg {

struct DiffusionConfig {
  double w_gray = 2.0;
  double w_black = 0.0;
  std::vector<double> channel_weights;  // aligned with ChannelClassMaps::channels
  double s_min = 7.0;
  int max_ray_len = 0;  // 0 = unbounded

  void validate(std::size_t channel_count) const;
};

/// 2 for the Cb and Cr channels, 1 for every other channel.
std::vector<double> default_channel_weights(std::span<const ChannelId> channels);

inline constexpr int kRayCount = 36;
inline constexpr int kRayStepDegrees = 10;

struct PixelCoord {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Pixels along a ray leaving `origin` (origin excluded), stepping one pixel
/// per step along the dominant axis and rounding the minor axis to the
/// nearest pixel. The y axis points down; angles run counter-clockwise from
/// +x. Stops at the image border or after max_len pixels (0 = unbounded).
std::vector<PixelCoord> ray_pixels(PixelCoord origin, int angle_degrees, int width,
                                   int height, int max_len);

/// Weighted sum of the ternary factor and the per-channel class agreement
/// max(0, 1 - |dlabel| / (k - 1)). A white under-test pixel is scored like a
/// gray one.
double diffusion_score(Ternary utp, std::span<const std::uint8_t> master_labels,
                       std::span<const std::uint8_t> utp_labels, int k,
                       const DiffusionConfig& cfg);

enum class DiffusionStage { First = 1, Second = 2 };

/// One raster-order diffusion pass. Stage one grows from the live working
/// mask; stage two grows only from the seed snapshot.
SkinMask diffuse_stage(const SkinMask& seed, const TernaryImage& t,
                       const ChannelClassMaps& classes, const EdgeMap& edges,
                       const DiffusionConfig& cfg, DiffusionStage stage);

/// Stage-two pass with an explicit origin snapshot, applied on top of
/// `initial`. Rays pass freely through snapshot pixels only, so the set of
/// accepted pixels depends on the snapshot alone.
SkinMask diffuse_from_origins(const SkinMask& origins, const SkinMask& initial,
                              const TernaryImage& t, const ChannelClassMaps& classes,
                              const EdgeMap& edges, const DiffusionConfig& cfg);

struct DiffusionResult {
  SkinMask stage1;
  SkinMask final_mask;
};

DiffusionResult diffuse_both(const SkinMask& seed, const TernaryImage& t,
                             const ChannelClassMaps& classes, const EdgeMap& edges,
                             const DiffusionConfig& cfg);

SkinMask diffuse(const SkinMask& seed, const TernaryImage& t,
                 const ChannelClassMaps& classes, const EdgeMap& edges,
                 const DiffusionConfig& cfg);

}  // namespace skinseg
