#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "skinseg/diffusion.hpp"
#include "skinseg/edges.hpp"
#include "skinseg/evalkit.hpp"
#include "skinseg/otsu.hpp"
#include "skinseg/seedgen.hpp"
#include "skinseg/skinmodel.hpp"

namespace skinseg {

/// Every tunable of a run. Text form is flat `key=value` lines with dotted
/// section prefixes, e.g. `seed.K=2`; `#` starts a comment.
struct PipelineConfig {
  TrainParams train;
  SeedParams seed;
  CannyParams canny;
  int otsu_k = 3;
  std::vector<ChannelId> channels = {ChannelId::Cb, ChannelId::Cr, ChannelId::I,
                                     ChannelId::H,  ChannelId::U,  ChannelId::A,
                                     ChannelId::Ch};
  // Empty channel_weights means default_channel_weights(channels).
  DiffusionConfig diffusion;
  int lut_bins = 32;
  double lut_theta = 1e-4;

  std::string model_path;
  std::string out_dir;
  bool debug_artifacts = false;
  int jobs = 1;

  void set(std::string_view key, std::string_view value);
  /// Applies every line of a config document on top of the current values.
  void apply_text(std::string_view text);
  void load_file(const std::string& path);
  /// Canonical dump of every key, readable by apply_text.
  std::string to_text() const;

  DiffusionConfig effective_diffusion() const;
  void validate() const;
};

enum class Stage : std::uint8_t {
  Ternary, Refine, Seed, Otsu, Edges, Diffusion1, Diffusion2,
};
inline constexpr std::size_t kStageCount = 7;
std::string_view stage_name(Stage s);

struct SegmentationResult {
  TernaryImage ternary;
  TernaryImage refined;
  SkinMask seed;
  ChannelClassMaps classes;
  EdgeMap edges;
  SkinMask stage1;
  SkinMask mask;
  std::array<double, kStageCount> stage_ms{};
};

SegmentationResult segment(const RgbImage& img, const SkinClusterModel& model,
                           const PipelineConfig& cfg);

/// Skin pixels of an image under a red/black/blue annotation.
std::vector<Rgb> harvest_skin_pixels(const RgbImage& img, const GroundTruth& gt);

}  // namespace skinseg
